#include "dagscore/errors.hpp"
#include "dagscore/fractional.hpp"
#include "dagscore/graphs.hpp"
#include "dagscore/scorer.hpp"
#include "dagscore/search.hpp"
#include "dagscore/simulate.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include <cmath>
#include <optional>

namespace py = pybind11;
using namespace dagscore;
using nlohmann::json;

namespace {

struct Inputs {
  ResponseMatrix y;
  DesignMatrix x;
};

Inputs make_inputs(const Matrix& y, const std::optional<Matrix>& z) {
  ResponseMatrix ym(y);
  if (!z || z->cols() == 0) return {std::move(ym), DesignMatrix::intercept_only(static_cast<int>(y.rows()))};
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < z->cols(); ++k) labels.push_back("z" + std::to_string(k + 1));
  return {std::move(ym), DesignMatrix::with_intercept(*z, std::move(labels))};
}

PredictorPool make_pool(const Matrix& y, const std::optional<Matrix>& z) {
  if (!z) return PredictorPool::empty(static_cast<int>(y.rows()));
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < z->cols(); ++k) labels.push_back("z" + std::to_string(k + 1));
  return {*z, std::move(labels)};
}

Adjacency make_adjacency(int q, const std::vector<std::pair<int, int>>& edges) {
  return Adjacency::from_edges(q, edges);
}

json zero_based_graph(const Dag& d) {
  return {{"q", d.q()}, {"parents", d.parent_sets()}};
}

double log_ml_subset_py(const Matrix& y, const std::optional<Matrix>& z, std::vector<int> subset,
                        const std::string& frac) {
  auto in = make_inputs(y, z);
  std::sort(subset.begin(), subset.end());
  const auto s = log_ml_subset(FractionalConfig::parse(frac), in.y, in.x, subset);
  return s.log_ml;
}

std::string dag_report_py(const Matrix& y, const std::vector<std::vector<int>>& parents,
                          const std::optional<Matrix>& z, const std::string& frac) {
  auto in = make_inputs(y, z);
  const auto d = validate_dag(parents);
  return report_to_json(dag_log_ml(d, FractionalConfig::parse(frac), in.y, in.x), dag_to_json(d)).dump();
}

std::string decomposable_report_py(const Matrix& y, const std::vector<std::pair<int, int>>& edges,
                                   const std::optional<Matrix>& z, const std::string& frac) {
  auto in = make_inputs(y, z);
  const auto g = check_decomposable(make_adjacency(in.y.q(), edges));
  return report_to_json(decomposable_log_ml(g, FractionalConfig::parse(frac), in.y, in.x),
                        decomposable_to_json(g))
      .dump();
}

std::string greedy_py(const Matrix& y, const std::optional<Matrix>& z, const std::string& frac,
                      const std::string& prior, int max_parents, int max_predictors, int restarts,
                      std::uint64_t seed) {
  ResponseMatrix ym(y);
  const auto pool = make_pool(y, z);
  GreedyOptions o;
  o.max_parents = max_parents;
  o.max_predictors = max_predictors;
  o.restarts = restarts;
  o.seed = seed;
  const auto res = greedy_dag_search(ym, pool, FractionalConfig::parse(frac),
                                     ModelPrior::parse(prior, ym.q()), o);
  json trace = json::array();
  for (const auto& s : res.trace) trace.push_back({{"restart", s.restart}, {"move", s.move}, {"score", s.score}});
  return json{{"best_graph", zero_based_graph(res.best_graph)},
              {"best_predictors", res.best_predictors},
              {"best_score", res.best_score},
              {"best_log_ml", res.best_log_ml},
              {"effective_frac", res.effective_config.to_string()},
              {"trace", trace},
              {"visited", res.visited}}
      .dump();
}

std::string mc3_py(const Matrix& y, const std::optional<Matrix>& z, const std::string& frac,
                   const std::string& prior, long iterations, double temperature, int chains,
                   std::uint64_t seed) {
  auto in = make_inputs(y, z);
  Mc3Options o;
  o.iterations = iterations;
  o.temperature = temperature;
  o.chains = chains;
  o.seed = seed;
  const auto res = mc3_decomposable(in.y, in.x, FractionalConfig::parse(frac),
                                    ModelPrior::parse(prior, in.y.q()), o);
  std::vector<std::vector<double>> freq(res.edge_frequency.rows());
  for (Eigen::Index i = 0; i < res.edge_frequency.rows(); ++i)
    for (Eigen::Index j = 0; j < res.edge_frequency.cols(); ++j) freq[i].push_back(res.edge_frequency(i, j));
  return json{{"best_edges", res.best_graph.adjacency.edges()},
              {"best_score", res.best_score},
              {"modal_edges", res.modal_graph.adjacency.edges()},
              {"modal_visits", res.modal_visits},
              {"edge_frequency", freq},
              {"accepted", res.accepted},
              {"visited", res.visited}}
      .dump();
}

std::string enumerate_py(const Matrix& y, const std::optional<Matrix>& z, const std::string& frac,
                         const std::string& prior, const std::string& mode) {
  auto in = make_inputs(y, z);
  const auto table = exhaustive_small(in.y, in.x, FractionalConfig::parse(frac),
                                      ModelPrior::parse(prior, in.y.q()),
                                      mode == "dag" ? EnumerationMode::dag : EnumerationMode::decomposable);
  json rows = json::array();
  for (const auto& r : table.rows) {
    json g = std::holds_alternative<Dag>(r.graph)
                 ? zero_based_graph(std::get<Dag>(r.graph))
                 : json{{"q", std::get<DecomposableGraph>(r.graph).q()},
                        {"edges", std::get<DecomposableGraph>(r.graph).adjacency.edges()}};
    rows.push_back({{"index", r.index}, {"class", r.class_id}, {"graph", g},
                    {"log_ml", std::isfinite(r.log_ml) ? json(r.log_ml) : json(nullptr)},
                    {"log_post", std::isfinite(r.log_post) ? json(r.log_post) : json(nullptr)},
                    {"valid", r.valid}});
  }
  return json{{"classes", table.classes}, {"rows", rows}}.dump();
}

py::tuple simulate_py(const std::string& spec_json, std::uint64_t seed) {
  const auto data = simulate(SimSpec::from_json(json::parse(spec_json)), seed);
  return py::make_tuple(data.y.values(), data.z.values, data.truth().dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fractional Bayes factor scoring for covariate-adjusted Gaussian graphical models";

  auto base = py::register_exception<Error>(m, "DagscoreError", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ProprietyError>(m, "ProprietyError", validation.ptr());
  py::register_exception<CycleError>(m, "CycleError", validation.ptr());
  py::register_exception<NonChordalError>(m, "NonChordalError", validation.ptr());

  m.def("log_multigamma", &log_multigamma, py::arg("q"), py::arg("x"));
  m.def("log_ml_subset", &log_ml_subset_py, py::arg("y"), py::arg("z") = py::none(),
        py::arg("subset"), py::arg("frac") = "recommended");
  m.def("_dag_report", &dag_report_py, py::arg("y"), py::arg("parents"), py::arg("z") = py::none(),
        py::arg("frac") = "recommended");
  m.def("_decomposable_report", &decomposable_report_py, py::arg("y"), py::arg("edges"),
        py::arg("z") = py::none(), py::arg("frac") = "recommended");
  m.def("is_chordal", [](int q, const std::vector<std::pair<int, int>>& edges) {
    return is_chordal(make_adjacency(q, edges));
  }, py::arg("q"), py::arg("edges"));
  m.def("markov_equivalent", [](const std::vector<std::vector<int>>& a, const std::vector<std::vector<int>>& b) {
    return fingerprint(validate_dag(a)) == fingerprint(validate_dag(b));
  }, py::arg("a"), py::arg("b"));
  m.def("_greedy", &greedy_py, py::arg("y"), py::arg("z"), py::arg("frac"), py::arg("prior"),
        py::arg("max_parents"), py::arg("max_predictors"), py::arg("restarts"), py::arg("seed"));
  m.def("_mc3", &mc3_py, py::arg("y"), py::arg("z"), py::arg("frac"), py::arg("prior"),
        py::arg("iterations"), py::arg("temperature"), py::arg("chains"), py::arg("seed"));
  m.def("_enumerate", &enumerate_py, py::arg("y"), py::arg("z"), py::arg("frac"), py::arg("prior"),
        py::arg("mode"));
  m.def("_simulate", &simulate_py, py::arg("spec_json"), py::arg("seed"));
}
