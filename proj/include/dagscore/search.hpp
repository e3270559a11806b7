#pragma once

#include "dagscore/scorer.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dagscore {

/// Prior on graph structures. Equivalent DAGs share edge counts, so both
/// kinds give them equal prior mass.
struct ModelPrior {
  enum class Kind { uniform, edge_binomial };
  Kind kind = Kind::uniform;
  double edge_prob = 0.5;

  static ModelPrior uniform() { return {}; }
  static ModelPrior edge_binomial(double edge_prob);
  /// edge_binomial with an expected q edges: edge_prob = 2 / (q - 1),
  /// capped at 0.5 for q <= 5.
  static ModelPrior default_for(int q);
  /// "uniform", "default" or "edge:P".
  static ModelPrior parse(std::string_view text, int q);
  std::string to_string() const;

  double log_prior(int edges, int max_edges) const;
  /// Change in log prior from adding one edge.
  double edge_delta() const;
};

/// Candidate predictors Z (n x p_star) for joint variable selection.
struct PredictorPool {
  Matrix values;
  std::vector<std::string> labels;

  static PredictorPool empty(int n) { return {Matrix(n, 0), {}}; }
  int size() const { return static_cast<int>(values.cols()); }
  DesignMatrix design(const VertexList& chosen) const;
};

struct SearchStep {
  int restart = 0;
  int iteration = 0;
  std::string move;
  double score = 0;
};

struct GreedyOptions {
  int max_parents = 3;
  int max_predictors = 5;
  int restarts = 1;
  std::uint64_t seed = 0;
  /// A move is applied only if it raises the log posterior by more than this.
  double min_improvement = 1e-9;
};

struct GreedyResult {
  Dag best_graph;
  VertexList best_predictors;
  double best_score = 0;   // log m(Y) + log prior
  double best_log_ml = 0;
  /// Fraction used for every design; in recommended mode n0 is fixed at
  /// max_predictors + 2 with a_D = q - 1.
  FractionalConfig effective_config;
  std::vector<SearchStep> trace;
  std::uint64_t visited = 0;
};

/// Hill climbing over (DAG, predictor subset): edge add / delete / reverse
/// and predictor add / drop share one neighbourhood. Restart 0 starts from
/// the empty graph with no predictors; later restarts start from seeded
/// random states. Throws ConfigError if max_parents >= n - max_predictors - 1.
GreedyResult greedy_dag_search(const ResponseMatrix& y, const PredictorPool& z,
                               const FractionalConfig& config, const ModelPrior& prior,
                               const GreedyOptions& opts);

struct Mc3Options {
  long iterations = 10000;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  int chains = 1;
};

struct Mc3Result {
  DecomposableGraph best_graph;  // highest log posterior visited
  double best_score = 0;
  DecomposableGraph modal_graph;  // most frequently visited
  long modal_visits = 0;
  Matrix edge_frequency;          // q x q, fraction of iterations with the edge
  std::vector<SearchStep> trace;  // improvements of the best state
  std::uint64_t visited = 0;      // proposals evaluated
  std::uint64_t accepted = 0;
  long distinct_states = 0;
  /// Distinct graphs with visit counts, in order of first visit.
  std::vector<std::pair<Adjacency, long>> visits;
  /// Last state of each chain.
  std::vector<Adjacency> final_states;
};

using GraphScoreFn = std::function<double(const DecomposableGraph&)>;

/// Metropolis-Hastings on decomposable graphs with single-edge toggles;
/// non-chordal proposals are rejected. Starts from the empty graph.
Mc3Result mc3_decomposable(int q, const GraphScoreFn& log_score, const ModelPrior& prior,
                           const Mc3Options& opts);
Mc3Result mc3_decomposable(const ResponseMatrix& y, const DesignMatrix& x,
                           const FractionalConfig& config, const ModelPrior& prior,
                           const Mc3Options& opts);

enum class EnumerationMode { dag, decomposable };

struct ExhaustiveRow {
  int index = 0;  // enumeration order
  std::variant<Dag, DecomposableGraph> graph;
  double log_ml = 0;
  double log_prior = 0;
  double log_post = 0;
  bool valid = true;
  int class_id = 0;  // Markov equivalence class (DAG mode)
};

struct ExhaustiveTable {
  EnumerationMode mode = EnumerationMode::dag;
  std::vector<ExhaustiveRow> rows;  // sorted by log_post, descending
  int classes = 0;
};

/// Scores every graph on q <= 5 vertices with one shared cache.
ExhaustiveTable exhaustive_small(const ResponseMatrix& y, const DesignMatrix& x,
                                 const FractionalConfig& config, const ModelPrior& prior,
                                 EnumerationMode mode);

}  // namespace dagscore
