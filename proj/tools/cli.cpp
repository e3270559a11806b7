#include "cli.hpp"

#include "dagscore/errors.hpp"
#include "dagscore/io.hpp"
#include "dagscore/parallel.hpp"
#include "dagscore/scorer.hpp"
#include "dagscore/search.hpp"
#include "dagscore/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <unistd.h>

namespace dagscore::cli {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json one_based(const VertexList& v) {
  json out = json::array();
  for (int k : v) out.push_back(k + 1);
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json trace_json(const std::vector<SearchStep>& trace) {
  json out = json::array();
  for (const auto& s : trace)
    out.push_back({{"restart", s.restart}, {"iteration", s.iteration}, {"move", s.move},
                   {"score", number(s.score)}});
  return out;
}

std::string host_name() {
  char buf[256] = {0};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

json cache_json(const ScoreCache& cache) {
  return {{"entries", cache.size()}, {"hits", cache.hits()}, {"misses", cache.misses()}};
}

struct DataOptions {
  std::string y_path;
  std::string z_path;
  std::string predictors;
  std::string frac = "recommended";
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--y", d.y_path, "Response CSV (n x q, header row)")->required();
  cmd->add_option("--z", d.z_path, "Predictor CSV (n x p_star, header row)");
  cmd->add_option("--predictors", d.predictors,
                  "1-based predictor columns of --z used in the design (default: all)");
  cmd->add_option("--frac", d.frac, "recommended | a_d=F,n0=K")->capture_default_str();
}

struct LoadedData {
  ResponseMatrix y;
  PredictorPool z;
  VertexList chosen;
  FractionalConfig frac;
};

LoadedData load(const DataOptions& d, bool default_all_predictors) {
  auto frac = FractionalConfig::parse(d.frac);
  auto [y, z] = ingest(d.y_path, d.z_path.empty() ? std::nullopt : std::optional(d.z_path));
  VertexList chosen;
  if (!d.predictors.empty()) {
    if (z.size() == 0) throw ConfigError("--predictors given without --z");
    chosen = parse_index_list(d.predictors, z.size());
  } else if (default_all_predictors) {
    for (int k = 0; k < z.size(); ++k) chosen.push_back(k);
  }
  return {std::move(y), std::move(z), std::move(chosen), frac};
}

json data_echo(const DataOptions& d, const LoadedData& data) {
  json e = {{"y", d.y_path}, {"frac", data.frac.to_string()}};
  e["z"] = d.z_path.empty() ? json(nullptr) : json(d.z_path);
  e["predictors"] = one_based(data.chosen);
  return e;
}

json data_shape(const LoadedData& data) {
  json labels = json::array();
  for (int k : data.chosen) labels.push_back(data.z.labels[k]);
  return {{"n", data.y.n()}, {"q", data.y.q()}, {"p", static_cast<int>(data.chosen.size())},
          {"p_star", data.z.size()}, {"response_labels", data.y.labels()},
          {"predictor_labels", labels}};
}

struct Report {
  json config;
  json result;
  json meta = json::object();
};

// ---------------------------------------------------------------------------

struct ScoreOptions {
  DataOptions data;
  std::string graph;
  bool decomposable = false;
  std::uint64_t seed = 0;
};

Report run_score(const ScoreOptions& o) {
  auto data = load(o.data, true);
  const auto x = data.z.design(data.chosen);
  FamilyScorer scorer(data.frac, data.y, x);
  const auto text = read_text_file(o.graph);
  Report r;
  r.config = data_echo(o.data, data);
  r.config["graph"] = o.graph;
  r.config["decomposable"] = o.decomposable;
  r.config["seed"] = o.seed;
  json graph_json;
  ScoreReport report;
  if (o.decomposable) {
    const auto g = check_decomposable(parse_undirected_text(text, data.y.q()));
    report = decomposable_log_ml(g, scorer);
    graph_json = decomposable_to_json(g);
  } else {
    const auto d = parse_dag_text(text, data.y.q());
    report = dag_log_ml(d, scorer);
    graph_json = dag_to_json(d);
  }
  r.result = data_shape(data);
  r.result["score"] = report_to_json(report, graph_json);
  r.meta["cache"] = cache_json(scorer.cache());
  return r;
}

// ---------------------------------------------------------------------------

struct SearchOptions {
  DataOptions data;
  std::string mode = "greedy";
  std::string prior = "default";
  int max_parents = 3;
  int max_predictors = 5;
  int restarts = 1;
  long iterations = 10000;
  double temperature = 1.0;
  int chains = 1;
  std::uint64_t seed = 0;
};

Report run_search(const SearchOptions& o) {
  const bool greedy = o.mode == "greedy";
  auto data = load(o.data, false);
  const auto prior = ModelPrior::parse(o.prior, data.y.q());
  Report r;
  r.config = data_echo(o.data, data);
  r.config["mode"] = o.mode;
  r.config["prior"] = prior.to_string();
  r.config["seed"] = o.seed;
  r.result = data_shape(data);
  r.result["mode"] = o.mode;
  if (greedy) {
    if (!o.data.predictors.empty())
      throw ConfigError("--predictors is not used by greedy search; it selects predictors itself");
    r.config["max_parents"] = o.max_parents;
    r.config["max_predictors"] = o.max_predictors;
    r.config["restarts"] = o.restarts;
    GreedyOptions g;
    g.max_parents = o.max_parents;
    g.max_predictors = o.max_predictors;
    g.restarts = o.restarts;
    g.seed = o.seed;
    const auto res = greedy_dag_search(data.y, data.z, data.frac, prior, g);
    const auto x = data.z.design(res.best_predictors);
    FamilyScorer scorer(res.effective_config, data.y, x);
    r.result["effective_frac"] = res.effective_config.to_string();
    const auto report = dag_log_ml(res.best_graph, scorer);
    json labels = json::array();
    for (int k : res.best_predictors) labels.push_back(data.z.labels[k]);
    r.result["p"] = static_cast<int>(res.best_predictors.size());
    r.result["predictor_labels"] = labels;
    r.result["best_graph"] = dag_to_json(res.best_graph);
    r.result["best_predictors"] = one_based(res.best_predictors);
    r.result["best_score"] = number(res.best_score);
    r.result["best_log_ml"] = number(res.best_log_ml);
    r.result["score"] = report_to_json(report, dag_to_json(res.best_graph));
    r.result["trace"] = trace_json(res.trace);
    r.result["visited"] = res.visited;
  } else {
    r.config["iterations"] = o.iterations;
    r.config["temperature"] = o.temperature;
    r.config["chains"] = o.chains;
    Mc3Options m;
    m.iterations = o.iterations;
    m.temperature = o.temperature;
    m.seed = o.seed;
    m.chains = o.chains;
    const auto x = data.z.design(data.chosen);
    FamilyScorer scorer(data.frac, data.y, x);
    const auto res = mc3_decomposable(
        data.y.q(), [&](const DecomposableGraph& g) { return decomposable_score(g, scorer); },
        prior, m);
    r.result["best_graph"] = decomposable_to_json(res.best_graph);
    r.result["best_score"] = number(res.best_score);
    r.result["modal_graph"] = decomposable_to_json(res.modal_graph);
    r.result["modal_visits"] = res.modal_visits;
    r.result["edge_frequency"] = matrix_json(res.edge_frequency);
    r.result["trace"] = trace_json(res.trace);
    r.result["visited"] = res.visited;
    r.result["accepted"] = res.accepted;
    r.result["distinct_states"] = res.distinct_states;
    r.meta["cache"] = cache_json(scorer.cache());
  }
  return r;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string spec;
  std::string out_dir;
  std::uint64_t seed = 0;
};

Report run_simulate(const SimulateOptions& o) {
  json raw;
  try {
    raw = json::parse(read_text_file(o.spec));
  } catch (const json::parse_error& e) {
    throw ParseError("simulation spec '" + o.spec + "': " + e.what(), 0);
  }
  const auto spec = SimSpec::from_json(raw);
  const auto data = simulate(spec, o.seed);
  const auto files = write_simulation(data, o.out_dir);
  Report r;
  r.config = {{"spec", o.spec}, {"resolved_spec", spec.to_json()}, {"out_dir", o.out_dir},
              {"seed", o.seed}};
  r.result = {{"files", files}, {"truth", data.truth()}};
  return r;
}

// ---------------------------------------------------------------------------

struct EnumerateOptions {
  DataOptions data;
  std::string mode = "dag";
  std::string prior = "uniform";
  int q_max = 5;
  std::uint64_t seed = 0;
};

Report run_enumerate(const EnumerateOptions& o) {
  if (o.q_max < 1 || o.q_max > 5) throw ConfigError("--q-max must lie in 1..5");
  auto data = load(o.data, true);
  if (data.y.q() > o.q_max)
    throw ConfigError("enumeration limited to q <= " + std::to_string(o.q_max) + ", data has q = " +
                      std::to_string(data.y.q()));
  const auto prior = ModelPrior::parse(o.prior, data.y.q());
  const auto mode = o.mode == "dag" ? EnumerationMode::dag : EnumerationMode::decomposable;
  const auto x = data.z.design(data.chosen);
  const auto table = exhaustive_small(data.y, x, data.frac, prior, mode);
  Report r;
  r.config = data_echo(o.data, data);
  r.config["mode"] = o.mode;
  r.config["prior"] = prior.to_string();
  r.config["q_max"] = o.q_max;
  r.config["seed"] = o.seed;
  json rows = json::array();
  int rank = 1;
  for (const auto& row : table.rows) {
    json g = std::holds_alternative<Dag>(row.graph)
                 ? dag_to_json(std::get<Dag>(row.graph))
                 : decomposable_to_json(std::get<DecomposableGraph>(row.graph));
    rows.push_back({{"rank", rank++},
                    {"index", row.index + 1},
                    {"class", row.class_id + 1},
                    {"graph", std::move(g)},
                    {"log_ml", number(row.log_ml)},
                    {"log_prior", number(row.log_prior)},
                    {"log_post", number(row.log_post)},
                    {"valid", row.valid}});
  }
  r.result = data_shape(data);
  r.result["mode"] = o.mode;
  r.result["graphs"] = static_cast<int>(table.rows.size());
  r.result["classes"] = table.classes;
  r.result["rows"] = std::move(rows);
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional Bayes factor scoring and search for Gaussian DAG models"};
  app.require_subcommand(1);
  std::string out_path;

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score one DAG or decomposable graph");
  add_data_options(score_cmd, score.data);
  score_cmd->add_option("--graph", score.graph, "Graph file")->required();
  score_cmd->add_flag("--decomposable", score.decomposable, "Graph file is undirected");
  score_cmd->add_option("--seed", score.seed, "Recorded seed");
  score_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  SearchOptions search;
  auto* search_cmd = app.add_subcommand("search", "Structure search");
  add_data_options(search_cmd, search.data);
  search_cmd->add_option("--mode", search.mode)->check(CLI::IsMember({"greedy", "mc3"}))->capture_default_str();
  search_cmd->add_option("--prior", search.prior, "uniform | default | edge:P")->capture_default_str();
  search_cmd->add_option("--max-parents", search.max_parents)->capture_default_str();
  search_cmd->add_option("--max-predictors", search.max_predictors)->capture_default_str();
  search_cmd->add_option("--restarts", search.restarts)->capture_default_str();
  search_cmd->add_option("--iterations", search.iterations)->capture_default_str();
  search_cmd->add_option("--temperature", search.temperature)->capture_default_str();
  search_cmd->add_option("--chains", search.chains)->capture_default_str();
  search_cmd->add_option("--seed", search.seed)->capture_default_str();
  search_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic data");
  sim_cmd->add_option("--spec", sim.spec, "Simulation spec JSON")->required();
  sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  EnumerateOptions en;
  auto* en_cmd = app.add_subcommand("enumerate", "Score every graph on q <= 5 vertices");
  add_data_options(en_cmd, en.data);
  en_cmd->add_option("--mode", en.mode)->check(CLI::IsMember({"dag", "decomposable"}))->capture_default_str();
  en_cmd->add_option("--prior", en.prior, "uniform | default | edge:P")->capture_default_str();
  en_cmd->add_option("--q-max", en.q_max)->capture_default_str();
  en_cmd->add_option("--seed", en.seed)->capture_default_str();
  en_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string command;
  try {
    const auto start = std::chrono::steady_clock::now();
    Report r;
    if (*score_cmd) {
      command = "score";
      r = run_score(score);
    } else if (*search_cmd) {
      command = "search";
      r = run_search(search);
    } else if (*sim_cmd) {
      command = "simulate";
      r = run_simulate(sim);
    } else {
      command = "enumerate";
      r = run_enumerate(en);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.meta["elapsed_seconds"] = elapsed;
    r.meta["host"] = host_name();
    r.meta["threads"] = thread_count();
    json report = {{"schema_version", kSchemaVersion},
                   {"command", command},
                   {"config", std::move(r.config)},
                   {"result", std::move(r.result)},
                   {"meta", std::move(r.meta)}};
    const auto text = report.dump(2) + "\n";
    if (out_path.empty()) out << text;
    else write_text_file(out_path, text);
    return 0;
  } catch (const IoError& e) {
    err << "dagscore " << command << ": I/O error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "dagscore " << command << ": " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "dagscore " << command << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dagscore::cli
