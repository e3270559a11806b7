#pragma once

#include "dagscore/linalg.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dagscore {

/// Canonical bitmask of a vertex subset: one 64-bit word per 64 vertices,
/// so q <= 64 uses a single word. Used as the score-cache key.
struct SubsetKey {
  std::vector<std::uint64_t> words;

  static SubsetKey of(std::span<const int> subset);
  bool operator==(const SubsetKey&) const = default;
};

struct SubsetKeyHash {
  std::size_t operator()(const SubsetKey& key) const noexcept;
};

/// Symmetric boolean adjacency with zero diagonal.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(int q) : q_(q), bits_(static_cast<std::size_t>(q) * q, 0) {}
  /// Throws ValidationError on out-of-range or self-loop edges.
  static Adjacency from_edges(int q, std::span<const std::pair<int, int>> edges);

  int q() const { return q_; }
  bool operator()(int i, int j) const { return bits_[static_cast<std::size_t>(i) * q_ + j] != 0; }
  void set(int i, int j, bool on);
  int edge_count() const;
  std::vector<std::pair<int, int>> edges() const;  // (i < j), lexicographic
  VertexList neighbors(int v) const;
  bool operator==(const Adjacency&) const = default;

 private:
  int q_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Directed acyclic graph stored as sorted parent sets. Built by validate_dag.
class Dag {
 public:
  int q() const { return static_cast<int>(parents_.size()); }
  const VertexList& parents(int j) const { return parents_[j]; }
  const std::vector<VertexList>& parent_sets() const { return parents_; }
  /// Kahn order with the lowest available index first.
  const std::vector<int>& topological_order() const { return order_; }
  /// pa(j) together with j, sorted.
  VertexList family(int j) const;
  bool has_edge(int from, int to) const;
  int edge_count() const;
  bool operator==(const Dag& o) const { return parents_ == o.parents_; }

 private:
  friend Dag validate_dag(std::vector<VertexList> parents);
  std::vector<VertexList> parents_;
  std::vector<int> order_;
};

/// Sorts and checks parent sets; throws ValidationError on bad indices or
/// self-loops and CycleError naming one directed cycle.
Dag validate_dag(std::vector<VertexList> parents);

Adjacency skeleton(const Dag& d);

struct EquivalenceFingerprint {
  std::set<std::pair<int, int>> skeleton;  // (i < j)
  /// (tail_low, head, tail_high) with the two tails non-adjacent.
  std::set<std::array<int, 3>> v_structures;
  auto operator<=>(const EquivalenceFingerprint&) const = default;
};

/// Two DAGs are Markov equivalent iff their fingerprints are equal.
EquivalenceFingerprint fingerprint(const Dag& d);

/// Chordal undirected graph with its junction forest.
struct DecomposableGraph {
  Adjacency adjacency;
  std::vector<VertexList> cliques;     // maximal cliques, sorted members
  std::vector<VertexList> separators;  // multiset, one per junction-forest edge
  std::vector<int> mcs_order;          // maximum cardinality search visit order
  std::vector<int> peo;                // perfect elimination ordering (reverse MCS)
  int components = 0;

  int q() const { return adjacency.q(); }
};

/// Maximum cardinality search order, ties broken by lowest vertex index.
std::vector<int> maximum_cardinality_search(const Adjacency& g);

bool is_chordal(const Adjacency& g);

/// Throws NonChordalError reporting one chordless cycle of length >= 4.
DecomposableGraph check_decomposable(const Adjacency& g);

/// Orients every edge along the maximum cardinality search order; the
/// result is Markov equivalent to g and has no v-structures.
Dag directed_version(const DecomposableGraph& g);

/// All DAGs on q <= 6 labelled vertices, in a fixed order.
std::vector<Dag> enumerate_dags(int q);

/// All decomposable graphs on q <= 7 labelled vertices, in a fixed order.
std::vector<Adjacency> enumerate_decomposable(int q);

}  // namespace dagscore
