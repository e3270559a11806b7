#pragma once

// Synthetic data from a Gaussian DAG model with predictors.
//
// Each vertex j, visited in topological order, is drawn as
//   y_j = x_true' alpha_j + sum_{k in pa(j)} gamma_kj y_k + e_j,  e_j ~ N(0, 1/lambda_j),
// with Z entries standard normal.

#include "dagscore/graphs.hpp"
#include "dagscore/mnw.hpp"
#include "dagscore/search.hpp"

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace dagscore {

struct SimSpec {
  enum class DagKind { empty, chain, random, explicit_parents };

  int n = 100;
  int q = 5;
  int p_star = 10;
  int p_true = 2;
  DagKind dag_kind = DagKind::chain;
  double edge_prob = 0.2;      // random DAGs
  int max_parents = 3;         // random DAGs
  std::vector<VertexList> parents;  // explicit DAGs, 0-based
  VertexList predictors;       // 0-based; drawn at random when empty and p_true > 0
  double coef_scale = 1.0;     // predictor effects
  double edge_scale = 1.0;     // parent effects
  std::vector<double> lambda;  // conditional precisions, one per vertex

  /// Keys: n, q, p_star, p_true, dag {kind, edge_prob, max_parents, parents},
  /// predictors, coef_scale, edge_scale (defaults to coef_scale), lambda
  /// (number or array). Indices are 1-based. Throws ConfigError.
  static SimSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct SimData {
  ResponseMatrix y;
  PredictorPool z;
  Dag dag;
  VertexList predictors;
  Matrix alpha;   // (1 + p_true) x q, first row the intercept
  Matrix gamma;   // q x q, gamma(k, j) weight of parent k in vertex j
  Vector lambda;
  std::uint64_t seed = 0;

  /// Implied precision (I - Gamma) Lambda (I - Gamma)'.
  Matrix omega() const;
  nlohmann::json truth() const;
};

SimData simulate(const SimSpec& spec, std::uint64_t seed);

/// Writes Y.csv, Z.csv (when p_star > 0) and truth.json; returns the paths.
std::vector<std::string> write_simulation(const SimData& data, const std::string& out_dir);

}  // namespace dagscore
