#pragma once

#include "dagscore/fractional.hpp"
#include "dagscore/graphs.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace dagscore {

/// Write-once map from vertex subsets to fractional subset scores.
/// Concurrent insert-if-absent; a racing duplicate computation is discarded
/// in favour of the value already stored.
class ScoreCache {
 public:
  /// Stored score for `key`, computing it with `compute` on a miss.
  /// References stay valid for the life of the cache.
  template <class Compute>
  const SubsetScore& get_or_insert(const SubsetKey& key, Compute&& compute) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = map_.find(key); it != map_.end()) {
        hits_.fetch_add(1, std::memory_order_relaxed);
        return it->second;
      }
    }
    misses_.fetch_add(1, std::memory_order_relaxed);
    SubsetScore value = compute();
    std::unique_lock lock(mutex_);
    return map_.try_emplace(key, std::move(value)).first->second;
  }

  const SubsetScore* find(const SubsetKey& key) const;
  std::size_t size() const;
  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<SubsetKey, SubsetScore, SubsetKeyHash> map_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

/// One regression fit (Y on X) plus a subset-score cache. Safe to share
/// across threads.
class FamilyScorer {
 public:
  FamilyScorer(const FractionalConfig& config, const ResponseMatrix& y, const DesignMatrix& x);
  FamilyScorer(const FractionalConfig& config, SufficientStats stats, int p);

  const SubsetScore& score(std::span<const int> subset);
  /// Uncached evaluation.
  SubsetScore score_uncached(std::span<const int> subset) const { return eval_.score(subset); }

  int n() const { return eval_.fraction().n; }
  int p() const { return eval_.fraction().p; }
  int q() const { return eval_.fraction().q; }
  /// Exclusive upper bound on family / clique sizes, n - p.
  int size_bound() const { return n() - p(); }
  const ScoreCache& cache() const { return cache_; }
  const FractionalEvaluator& evaluator() const { return eval_; }

 private:
  FractionalEvaluator eval_;
  ScoreCache cache_;
};

enum class GraphKind { dag, decomposable };

struct FamilyTerm {
  int vertex = 0;
  VertexList family;
  double family_log_ml = 0;
  double parent_log_ml = 0;
};

struct CliqueTerm {
  bool separator = false;
  VertexList set;
  double log_ml = 0;
};

struct Violation {
  std::string where;  // "family", "clique" or "separator"
  int vertex = -1;    // family owner, -1 otherwise
  VertexList set;
  int bound = 0;      // exclusive size bound n - p
  int actual = 0;
  std::string reason;
};

struct ScoreReport {
  GraphKind kind = GraphKind::dag;
  double log_ml = 0;
  bool valid = true;
  std::vector<FamilyTerm> per_vertex;  // DAG mode
  std::vector<CliqueTerm> per_clique;  // decomposable mode
  std::vector<Violation> violations;
};

/// sum_j [log m(Y_fa(j)) - log m(Y_pa(j))]; infeasible families are reported
/// as violations with valid = false and log_ml = -inf.
ScoreReport dag_log_ml(const Dag& d, FamilyScorer& scorer);
ScoreReport dag_log_ml(const Dag& d, const FractionalConfig& config, const ResponseMatrix& y,
                       const DesignMatrix& x);

/// sum over cliques minus sum over separators (with multiplicity).
ScoreReport decomposable_log_ml(const DecomposableGraph& g, FamilyScorer& scorer);
ScoreReport decomposable_log_ml(const DecomposableGraph& g, const FractionalConfig& config,
                                const ResponseMatrix& y, const DesignMatrix& x);

/// Score-only fast paths for search; -inf when infeasible.
double family_score(int vertex, const VertexList& parents, FamilyScorer& scorer);
double dag_score(const Dag& d, FamilyScorer& scorer);
double decomposable_score(const DecomposableGraph& g, FamilyScorer& scorer);

/// Vertex indices are written 1-based. `graph` carries the parent sets or
/// the edge list with cliques and separators.
nlohmann::json report_to_json(const ScoreReport& report, const nlohmann::json& graph);
nlohmann::json dag_to_json(const Dag& d);
nlohmann::json decomposable_to_json(const DecomposableGraph& g);

}  // namespace dagscore
