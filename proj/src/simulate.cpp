#include "dagscore/simulate.hpp"

#include "dagscore/errors.hpp"
#include "dagscore/io.hpp"
#include "dagscore/scorer.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>

namespace dagscore {

using nlohmann::json;

namespace {

std::string kind_name(SimSpec::DagKind k) {
  switch (k) {
    case SimSpec::DagKind::empty: return "empty";
    case SimSpec::DagKind::chain: return "chain";
    case SimSpec::DagKind::random: return "random";
    case SimSpec::DagKind::explicit_parents: return "explicit";
  }
  return "";
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("simulation spec field '") + key + "': " + e.what());
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

double signed_uniform(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::bernoulli_distribution sign(0.5);
  const double v = scale * mag(rng);
  return sign(rng) ? v : -v;
}

}  // namespace

SimSpec SimSpec::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("simulation spec must be a JSON object");
  static const std::vector<std::string> known = {"n", "q", "p_star", "p_true", "dag", "predictors",
                                                 "coef_scale", "edge_scale", "lambda"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown simulation spec field '" + it.key() + "'");
  SimSpec s;
  s.n = get_or(j, "n", s.n);
  s.q = get_or(j, "q", s.q);
  s.p_star = get_or(j, "p_star", s.p_star);
  s.p_true = get_or(j, "p_true", s.p_true);
  s.coef_scale = get_or(j, "coef_scale", s.coef_scale);
  s.edge_scale = get_or(j, "edge_scale", s.coef_scale);
  if (j.contains("dag")) {
    const auto& d = j.at("dag");
    const auto kind = get_or<std::string>(d, "kind", "chain");
    if (kind == "empty") s.dag_kind = DagKind::empty;
    else if (kind == "chain") s.dag_kind = DagKind::chain;
    else if (kind == "random") s.dag_kind = DagKind::random;
    else if (kind == "explicit") s.dag_kind = DagKind::explicit_parents;
    else throw ConfigError("unknown dag kind '" + kind + "'");
    s.edge_prob = get_or(d, "edge_prob", s.edge_prob);
    s.max_parents = get_or(d, "max_parents", s.max_parents);
    if (s.dag_kind == DagKind::explicit_parents) {
      const auto raw = get_or<std::vector<std::vector<int>>>(d, "parents", {});
      for (const auto& pa : raw) {
        VertexList v;
        for (int k : pa) v.push_back(k - 1);
        s.parents.push_back(std::move(v));
      }
    }
  }
  for (int k : get_or<std::vector<int>>(j, "predictors", {})) s.predictors.push_back(k - 1);
  if (j.contains("lambda")) {
    if (j.at("lambda").is_number()) s.lambda.assign(s.q, j.at("lambda").get<double>());
    else s.lambda = get_or<std::vector<double>>(j, "lambda", {});
  }
  if (s.lambda.empty()) s.lambda.assign(std::max(s.q, 0), 1.0);
  s.validate();
  return s;
}

void SimSpec::validate() const {
  if (n < 1 || q < 1) throw ConfigError("simulation needs n >= 1 and q >= 1");
  if (p_star < 0 || p_true < 0 || p_true > p_star) throw ConfigError("need 0 <= p_true <= p_star");
  if (!predictors.empty()) {
    if (static_cast<int>(predictors.size()) != p_true)
      throw ConfigError("predictors list must have p_true entries");
    for (int k : predictors)
      if (k < 0 || k >= p_star) throw ConfigError("predictor index outside 1..p_star");
  }
  if (static_cast<int>(lambda.size()) != q) throw ConfigError("lambda must have q entries");
  for (double l : lambda)
    if (!(l > 0)) throw ConfigError("lambda entries must be positive");
  if (!(edge_prob >= 0 && edge_prob <= 1)) throw ConfigError("edge_prob must lie in [0, 1]");
  if (max_parents < 0) throw ConfigError("max_parents must be non-negative");
  if (dag_kind == DagKind::explicit_parents && static_cast<int>(parents.size()) != q)
    throw ConfigError("explicit dag needs q parent lists");
}

json SimSpec::to_json() const {
  json d = {{"kind", kind_name(dag_kind)}};
  if (dag_kind == DagKind::random) {
    d["edge_prob"] = edge_prob;
    d["max_parents"] = max_parents;
  }
  if (dag_kind == DagKind::explicit_parents) {
    json pa = json::array();
    for (const auto& p : parents) {
      json one = json::array();
      for (int k : p) one.push_back(k + 1);
      pa.push_back(std::move(one));
    }
    d["parents"] = std::move(pa);
  }
  json preds = json::array();
  for (int k : predictors) preds.push_back(k + 1);
  return {{"n", n}, {"q", q}, {"p_star", p_star}, {"p_true", p_true}, {"dag", d},
          {"predictors", preds}, {"coef_scale", coef_scale}, {"edge_scale", edge_scale},
          {"lambda", lambda}};
}

Matrix SimData::omega() const {
  const int q = static_cast<int>(gamma.rows());
  const Matrix a = Matrix::Identity(q, q) - gamma;
  return a * lambda.asDiagonal() * a.transpose();
}

json SimData::truth() const {
  json preds = json::array();
  for (int k : predictors) preds.push_back(k + 1);
  json labels = json::array();
  for (int k : predictors) labels.push_back(z.labels[k]);
  return {{"seed", seed},
          {"dag", dag_to_json(dag)},
          {"predictors", preds},
          {"predictor_labels", labels},
          {"alpha", matrix_json(alpha)},
          {"gamma", matrix_json(gamma)},
          {"lambda", std::vector<double>(lambda.data(), lambda.data() + lambda.size())},
          {"omega", matrix_json(omega())}};
}

SimData simulate(const SimSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int q = spec.q;

  std::vector<VertexList> parents(q);
  switch (spec.dag_kind) {
    case SimSpec::DagKind::empty: break;
    case SimSpec::DagKind::chain:
      for (int j = 1; j < q; ++j) parents[j] = {j - 1};
      break;
    case SimSpec::DagKind::random: {
      std::bernoulli_distribution coin(spec.edge_prob);
      for (int j = 1; j < q; ++j) {
        VertexList cand;
        for (int i = 0; i < j; ++i)
          if (coin(rng)) cand.push_back(i);
        std::shuffle(cand.begin(), cand.end(), rng);
        if (static_cast<int>(cand.size()) > spec.max_parents) cand.resize(spec.max_parents);
        parents[j] = std::move(cand);
      }
      break;
    }
    case SimSpec::DagKind::explicit_parents: parents = spec.parents; break;
  }
  Dag dag = validate_dag(std::move(parents));

  VertexList chosen = spec.predictors;
  if (chosen.empty() && spec.p_true > 0) {
    std::vector<int> all(spec.p_star);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    chosen.assign(all.begin(), all.begin() + spec.p_true);
  }
  std::sort(chosen.begin(), chosen.end());

  Matrix alpha = Matrix::Zero(1 + spec.p_true, q);
  for (int r = 1; r <= spec.p_true; ++r)
    for (int j = 0; j < q; ++j) alpha(r, j) = signed_uniform(rng, spec.coef_scale);
  Matrix gamma = Matrix::Zero(q, q);
  for (int j = 0; j < q; ++j)
    for (int k : dag.parents(j)) gamma(k, j) = signed_uniform(rng, spec.edge_scale);
  Vector lambda = Eigen::Map<const Vector>(spec.lambda.data(), q);

  Matrix zv(spec.n, spec.p_star);
  for (Eigen::Index c = 0; c < zv.cols(); ++c)
    for (Eigen::Index r = 0; r < zv.rows(); ++r) zv(r, c) = normal(rng);
  Matrix noise(spec.n, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < spec.n; ++i) noise(i, j) = normal(rng) / std::sqrt(lambda(j));

  Matrix yv = Matrix::Zero(spec.n, q);
  for (int j : dag.topological_order()) {
    Vector col = Vector::Constant(spec.n, alpha(0, j)) + noise.col(j);
    for (int r = 0; r < spec.p_true; ++r) col += alpha(r + 1, j) * zv.col(chosen[r]);
    for (int k : dag.parents(j)) col += gamma(k, j) * yv.col(k);
    yv.col(j) = col;
  }

  std::vector<std::string> zlabels, ylabels;
  for (int k = 0; k < spec.p_star; ++k) zlabels.push_back("z" + std::to_string(k + 1));
  for (int j = 0; j < q; ++j) ylabels.push_back("y" + std::to_string(j + 1));
  return SimData{ResponseMatrix(std::move(yv), std::move(ylabels)),
                 PredictorPool{std::move(zv), std::move(zlabels)},
                 std::move(dag),
                 std::move(chosen),
                 std::move(alpha),
                 std::move(gamma),
                 std::move(lambda),
                 seed};
}

std::vector<std::string> write_simulation(const SimData& data, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
  const auto base = std::filesystem::path(out_dir);
  std::vector<std::string> written;
  const auto y_path = (base / "Y.csv").string();
  write_csv(y_path, data.y.values(), data.y.labels());
  written.push_back(y_path);
  if (data.z.size() > 0) {
    const auto z_path = (base / "Z.csv").string();
    write_csv(z_path, data.z.values, data.z.labels);
    written.push_back(z_path);
  }
  const auto t_path = (base / "truth.json").string();
  write_text_file(t_path, data.truth().dump(2) + "\n");
  written.push_back(t_path);
  return written;
}

}  // namespace dagscore
