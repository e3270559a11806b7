#include "dagscore/graphs.hpp"

#include "dagscore/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <sstream>

namespace dagscore {

SubsetKey SubsetKey::of(std::span<const int> subset) {
  SubsetKey key;
  for (int v : subset) {
    const auto w = static_cast<std::size_t>(v) / 64;
    if (key.words.size() <= w) key.words.resize(w + 1, 0);
    key.words[w] |= std::uint64_t{1} << (v % 64);
  }
  return key;
}

std::size_t SubsetKeyHash::operator()(const SubsetKey& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.words.size();
  for (auto w : key.words) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 33));
}

// ---------------------------------------------------------------------------
// Adjacency

Adjacency Adjacency::from_edges(int q, std::span<const std::pair<int, int>> edges) {
  Adjacency g(q);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= q || j >= q)
      throw ValidationError("edge endpoint out of range");
    if (i == j) throw ValidationError("self-loop on vertex " + std::to_string(i + 1));
    g.set(i, j, true);
  }
  return g;
}

void Adjacency::set(int i, int j, bool on) {
  bits_[static_cast<std::size_t>(i) * q_ + j] = on;
  bits_[static_cast<std::size_t>(j) * q_ + i] = on;
}

int Adjacency::edge_count() const {
  int count = 0;
  for (int i = 0; i < q_; ++i)
    for (int j = i + 1; j < q_; ++j) count += (*this)(i, j);
  return count;
}

std::vector<std::pair<int, int>> Adjacency::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < q_; ++i)
    for (int j = i + 1; j < q_; ++j)
      if ((*this)(i, j)) out.emplace_back(i, j);
  return out;
}

VertexList Adjacency::neighbors(int v) const {
  VertexList out;
  for (int u = 0; u < q_; ++u)
    if (u != v && (*this)(v, u)) out.push_back(u);
  return out;
}

// ---------------------------------------------------------------------------
// DAGs

VertexList Dag::family(int j) const {
  VertexList f = parents_[j];
  f.insert(std::upper_bound(f.begin(), f.end(), j), j);
  return f;
}

bool Dag::has_edge(int from, int to) const {
  return std::binary_search(parents_[to].begin(), parents_[to].end(), from);
}

int Dag::edge_count() const {
  int count = 0;
  for (const auto& p : parents_) count += static_cast<int>(p.size());
  return count;
}

namespace {

std::vector<int> find_cycle(const std::vector<VertexList>& parents) {
  const int q = static_cast<int>(parents.size());
  std::vector<VertexList> children(q);
  for (int j = 0; j < q; ++j)
    for (int p : parents[j]) children[p].push_back(j);
  std::vector<int> color(q, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> stack;
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int u) {
    color[u] = 1;
    stack.push_back(u);
    for (int v : children[u]) {
      if (color[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        cycle.push_back(v);
        return true;
      }
      if (color[v] == 0 && dfs(v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (int s = 0; s < q; ++s)
    if (color[s] == 0 && dfs(s)) return cycle;
  return {};
}

}  // namespace

Dag validate_dag(std::vector<VertexList> parents) {
  const int q = static_cast<int>(parents.size());
  for (int j = 0; j < q; ++j) {
    auto& pa = parents[j];
    std::sort(pa.begin(), pa.end());
    pa.erase(std::unique(pa.begin(), pa.end()), pa.end());
    for (int v : pa) {
      if (v < 0 || v >= q)
        throw ValidationError("parent " + std::to_string(v + 1) + " of vertex " +
                              std::to_string(j + 1) + " is out of range");
      if (v == j) throw ValidationError("self-loop on vertex " + std::to_string(j + 1));
    }
  }
  std::vector<int> indegree(q);
  std::vector<VertexList> children(q);
  for (int j = 0; j < q; ++j) {
    indegree[j] = static_cast<int>(parents[j].size());
    for (int p : parents[j]) children[p].push_back(j);
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int j = 0; j < q; ++j)
    if (indegree[j] == 0) ready.push(j);
  std::vector<int> order;
  order.reserve(q);
  while (!ready.empty()) {
    const int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int c : children[u])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (static_cast<int>(order.size()) != q) {
    auto cycle = find_cycle(parents);
    std::ostringstream os;
    os << "graph has a directed cycle:";
    for (std::size_t i = 0; i < cycle.size(); ++i) os << (i ? " -> " : " ") << cycle[i] + 1;
    throw CycleError(os.str(), std::move(cycle));
  }
  Dag d;
  d.parents_ = std::move(parents);
  d.order_ = std::move(order);
  return d;
}

Adjacency skeleton(const Dag& d) {
  Adjacency g(d.q());
  for (int j = 0; j < d.q(); ++j)
    for (int p : d.parents(j)) g.set(p, j, true);
  return g;
}

EquivalenceFingerprint fingerprint(const Dag& d) {
  EquivalenceFingerprint fp;
  const Adjacency g = skeleton(d);
  for (const auto& e : g.edges()) fp.skeleton.insert(e);
  for (int k = 0; k < d.q(); ++k) {
    const auto& pa = d.parents(k);
    for (std::size_t a = 0; a < pa.size(); ++a)
      for (std::size_t b = a + 1; b < pa.size(); ++b)
        if (!g(pa[a], pa[b])) fp.v_structures.insert({pa[a], k, pa[b]});
  }
  return fp;
}

// ---------------------------------------------------------------------------
// Chordal graphs

std::vector<int> maximum_cardinality_search(const Adjacency& g) {
  const int q = g.q();
  std::vector<int> weight(q, 0);
  std::vector<bool> numbered(q, false);
  std::vector<int> order;
  order.reserve(q);
  for (int step = 0; step < q; ++step) {
    int best = -1;
    for (int v = 0; v < q; ++v)
      if (!numbered[v] && (best < 0 || weight[v] > weight[best])) best = v;
    numbered[best] = true;
    order.push_back(best);
    for (int u = 0; u < q; ++u)
      if (!numbered[u] && g(best, u)) ++weight[u];
  }
  return order;
}

namespace {

/// Neighbours of each vertex that precede it in `order`.
std::vector<VertexList> earlier_neighbors(const Adjacency& g, const std::vector<int>& order) {
  const int q = g.q();
  std::vector<int> pos(q);
  for (int i = 0; i < q; ++i) pos[order[i]] = i;
  std::vector<VertexList> out(q);
  for (int v = 0; v < q; ++v)
    for (int u = 0; u < q; ++u)
      if (u != v && g(u, v) && pos[u] < pos[v]) out[v].push_back(u);
  return out;
}

bool order_is_perfect(const Adjacency& g, const std::vector<VertexList>& earlier) {
  for (const auto& nb : earlier)
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (!g(nb[a], nb[b])) return false;
  return true;
}

/// Shortest u-w path avoiding the closed neighbourhood of v (except u, w).
/// Together with v it closes a chordless cycle.
std::vector<int> chordless_cycle(const Adjacency& g) {
  const int q = g.q();
  for (int v = 0; v < q; ++v) {
    const auto nb = g.neighbors(v);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        const int u = nb[a], w = nb[b];
        if (g(u, w)) continue;
        std::vector<bool> blocked(q, false);
        blocked[v] = true;
        for (int x : nb)
          if (x != u && x != w) blocked[x] = true;
        std::vector<int> prev(q, -1);
        std::deque<int> queue{u};
        prev[u] = u;
        while (!queue.empty() && prev[w] < 0) {
          const int x = queue.front();
          queue.pop_front();
          for (int y = 0; y < q; ++y)
            if (!blocked[y] && prev[y] < 0 && g(x, y)) {
              prev[y] = x;
              queue.push_back(y);
            }
        }
        if (prev[w] < 0) continue;
        std::vector<int> cycle{v};
        std::vector<int> path;
        for (int x = w; x != u; x = prev[x]) path.push_back(x);
        path.push_back(u);
        cycle.insert(cycle.end(), path.rbegin(), path.rend());
        return cycle;
      }
  }
  return {};
}

}  // namespace

bool is_chordal(const Adjacency& g) {
  const auto order = maximum_cardinality_search(g);
  return order_is_perfect(g, earlier_neighbors(g, order));
}

DecomposableGraph check_decomposable(const Adjacency& g) {
  DecomposableGraph out;
  out.adjacency = g;
  out.mcs_order = maximum_cardinality_search(g);
  const auto earlier = earlier_neighbors(g, out.mcs_order);
  if (!order_is_perfect(g, earlier)) {
    auto cycle = chordless_cycle(g);
    std::ostringstream os;
    os << "graph is not decomposable; chordless cycle:";
    for (int v : cycle) os << ' ' << v + 1;
    throw NonChordalError(os.str(), std::move(cycle));
  }
  out.peo.assign(out.mcs_order.rbegin(), out.mcs_order.rend());

  // Candidate cliques {v} + earlier neighbours, in visit order; keep maximal ones.
  std::vector<VertexList> candidates;
  for (int v : out.mcs_order) {
    VertexList c = earlier[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
      if (i == j || candidates[j].size() < candidates[i].size()) continue;
      if (candidates[j].size() == candidates[i].size() && j > i) continue;
      if (std::includes(candidates[j].begin(), candidates[j].end(), candidates[i].begin(),
                        candidates[i].end()))
        maximal = false;
    }
    if (maximal) out.cliques.push_back(candidates[i]);
  }

  // Junction forest: maximum-weight spanning forest of the clique
  // intersection graph (Kruskal, ties by clique index).
  struct Link {
    int weight, a, b;
    VertexList sep;
  };
  std::vector<Link> links;
  const int m = static_cast<int>(out.cliques.size());
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      VertexList sep;
      std::set_intersection(out.cliques[a].begin(), out.cliques[a].end(), out.cliques[b].begin(),
                            out.cliques[b].end(), std::back_inserter(sep));
      if (!sep.empty()) links.push_back({static_cast<int>(sep.size()), a, b, std::move(sep)});
    }
  std::stable_sort(links.begin(), links.end(),
                   [](const Link& x, const Link& y) { return x.weight > y.weight; });
  std::vector<int> root(m);
  for (int i = 0; i < m; ++i) root[i] = i;
  std::function<int(int)> find = [&](int x) { return root[x] == x ? x : root[x] = find(root[x]); };
  for (auto& l : links) {
    const int ra = find(l.a), rb = find(l.b);
    if (ra == rb) continue;
    root[std::max(ra, rb)] = std::min(ra, rb);
    out.separators.push_back(std::move(l.sep));
  }
  out.components = m - static_cast<int>(out.separators.size());
  return out;
}

Dag directed_version(const DecomposableGraph& g) {
  const auto earlier = earlier_neighbors(g.adjacency, g.mcs_order);
  return validate_dag(earlier);
}

// ---------------------------------------------------------------------------
// Enumeration

std::vector<Dag> enumerate_dags(int q) {
  if (q < 1 || q > 6) throw ConfigError("DAG enumeration supports 1 <= q <= 6");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
  const std::size_t k = pairs.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= 3;
  std::vector<Dag> out;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    std::vector<VertexList> parents(q);
    for (std::size_t e = 0; e < k; ++e) {
      const int s = static_cast<int>(c % 3);
      c /= 3;
      if (s == 1) parents[pairs[e].second].push_back(pairs[e].first);
      if (s == 2) parents[pairs[e].first].push_back(pairs[e].second);
    }
    try {
      out.push_back(validate_dag(std::move(parents)));
    } catch (const CycleError&) {
    }
  }
  return out;
}

std::vector<Adjacency> enumerate_decomposable(int q) {
  if (q < 1 || q > 7) throw ConfigError("decomposable enumeration supports 1 <= q <= 7");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
  std::vector<Adjacency> out;
  const std::uint64_t total = std::uint64_t{1} << pairs.size();
  for (std::uint64_t code = 0; code < total; ++code) {
    Adjacency g(q);
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (code >> e & 1U) g.set(pairs[e].first, pairs[e].second, true);
    if (is_chordal(g)) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace dagscore
