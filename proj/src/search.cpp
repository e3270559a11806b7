#include "dagscore/search.hpp"

#include "dagscore/errors.hpp"
#include "dagscore/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace dagscore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int max_edge_count(int q) { return q * (q - 1) / 2; }

}  // namespace

// ---------------------------------------------------------------------------
// Model prior

ModelPrior ModelPrior::edge_binomial(double edge_prob) {
  if (!(edge_prob > 0.0 && edge_prob < 1.0))
    throw ConfigError("edge probability must lie in (0, 1)");
  return {Kind::edge_binomial, edge_prob};
}

ModelPrior ModelPrior::default_for(int q) {
  return edge_binomial(q > 5 ? 2.0 / (q - 1) : 0.5);
}

ModelPrior ModelPrior::parse(std::string_view text, int q) {
  if (text == "uniform") return uniform();
  if (text == "default") return default_for(q);
  if (text.starts_with("edge:")) {
    const std::string value(text.substr(5));
    char* end = nullptr;
    const double p = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') throw ConfigError("bad edge probability '" + value + "'");
    return edge_binomial(p);
  }
  throw ConfigError("model prior must be 'uniform', 'default' or 'edge:P'");
}

std::string ModelPrior::to_string() const {
  if (kind == Kind::uniform) return "uniform";
  std::ostringstream os;
  os.precision(17);
  os << "edge:" << edge_prob;
  return os.str();
}

double ModelPrior::log_prior(int edges, int max_edges) const {
  if (kind == Kind::uniform) return 0.0;
  return edges * std::log(edge_prob) + (max_edges - edges) * std::log1p(-edge_prob);
}

double ModelPrior::edge_delta() const {
  if (kind == Kind::uniform) return 0.0;
  return std::log(edge_prob) - std::log1p(-edge_prob);
}

DesignMatrix PredictorPool::design(const VertexList& chosen) const {
  std::vector<std::string> names;
  for (int k : chosen) names.push_back(labels[k]);
  return DesignMatrix::with_intercept(select_columns(values, chosen), std::move(names));
}

// ---------------------------------------------------------------------------
// Greedy search

namespace {

/// Lazily built regression fits keyed by predictor subset. A null entry
/// marks a design that cannot be scored (rank deficient or improper).
class DesignPool {
 public:
  DesignPool(const ResponseMatrix& y, const PredictorPool& z, const FractionalConfig& config)
      : y_(y), z_(z), config_(config) {}

  std::shared_ptr<FamilyScorer> get(const VertexList& preds) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = pool_.find(preds); it != pool_.end()) return it->second;
    }
    std::shared_ptr<FamilyScorer> made;
    try {
      made = std::make_shared<FamilyScorer>(config_, y_, z_.design(preds));
    } catch (const ValidationError&) {
    }
    std::lock_guard lock(mutex_);
    return pool_.try_emplace(preds, std::move(made)).first->second;
  }

 private:
  const ResponseMatrix& y_;
  const PredictorPool& z_;
  FractionalConfig config_;
  std::mutex mutex_;
  std::map<VertexList, std::shared_ptr<FamilyScorer>> pool_;
};

enum class MoveKind { add_edge = 0, delete_edge = 1, reverse_edge = 2, add_predictor = 3, drop_predictor = 4 };

struct Move {
  MoveKind kind;
  int a;
  int b;
  auto key() const { return std::tuple(static_cast<int>(kind), a, b); }
};

std::string describe(const Move& m, const PredictorPool& z) {
  std::ostringstream os;
  switch (m.kind) {
    case MoveKind::add_edge: os << "add " << m.a + 1 << "->" << m.b + 1; break;
    case MoveKind::delete_edge: os << "delete " << m.a + 1 << "->" << m.b + 1; break;
    case MoveKind::reverse_edge: os << "reverse " << m.a + 1 << "->" << m.b + 1; break;
    case MoveKind::add_predictor: os << "add_predictor " << z.labels[m.a]; break;
    case MoveKind::drop_predictor: os << "drop_predictor " << z.labels[m.a]; break;
  }
  return os.str();
}

VertexList with(VertexList s, int v) {
  s.insert(std::lower_bound(s.begin(), s.end(), v), v);
  return s;
}

VertexList without(VertexList s, int v) {
  s.erase(std::lower_bound(s.begin(), s.end(), v));
  return s;
}

/// reach[u][v]: a directed path of length >= 1 leads from u to v.
std::vector<std::vector<char>> reachability(const std::vector<VertexList>& parents) {
  const int q = static_cast<int>(parents.size());
  std::vector<VertexList> children(q);
  for (int j = 0; j < q; ++j)
    for (int p : parents[j]) children[p].push_back(j);
  std::vector<std::vector<char>> reach(q, std::vector<char>(q, 0));
  for (int s = 0; s < q; ++s) {
    std::vector<int> stack(children[s].begin(), children[s].end());
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (reach[s][v]) continue;
      reach[s][v] = 1;
      for (int c : children[v]) stack.push_back(c);
    }
  }
  return reach;
}

struct ClimbState {
  std::vector<VertexList> parents;
  VertexList preds;
  std::shared_ptr<FamilyScorer> scorer;
  std::vector<double> terms;
  double log_ml = 0;
  int edges = 0;
};

double total_terms(const std::vector<VertexList>& parents, FamilyScorer& scorer,
                   std::vector<double>* terms) {
  double total = 0;
  for (int j = 0; j < static_cast<int>(parents.size()); ++j) {
    const double t = family_score(j, parents[j], scorer);
    if (terms) (*terms)[j] = t;
    if (t == kNegInf) return kNegInf;
    total += t;
  }
  return total;
}

class GreedyClimber {
 public:
  GreedyClimber(const ResponseMatrix& y, const PredictorPool& z, const ModelPrior& prior,
                const GreedyOptions& opts, DesignPool& designs)
      : y_(y), z_(z), prior_(prior), opts_(opts), designs_(designs), q_(y.q()) {}

  /// Returns false when the start state is infeasible.
  bool start(std::vector<VertexList> parents, VertexList preds) {
    s_.parents = std::move(parents);
    s_.preds = std::move(preds);
    s_.scorer = designs_.get(s_.preds);
    if (!s_.scorer) return false;
    s_.terms.assign(q_, 0.0);
    s_.log_ml = total_terms(s_.parents, *s_.scorer, &s_.terms);
    s_.edges = 0;
    for (const auto& p : s_.parents) s_.edges += static_cast<int>(p.size());
    return s_.log_ml != kNegInf;
  }

  double score() const { return s_.log_ml + prior_.log_prior(s_.edges, max_edge_count(q_)); }
  const ClimbState& state() const { return s_; }

  void climb(int restart, std::vector<SearchStep>& trace, std::uint64_t& visited) {
    trace.push_back({restart, 0, "start", score()});
    for (int iteration = 1;; ++iteration) {
      const auto moves = candidate_moves();
      std::vector<double> gains(moves.size(), kNegInf);
      parallel_for(moves.size(), [&](std::size_t i) { gains[i] = gain(moves[i]); });
      visited += moves.size();
      std::size_t best = moves.size();
      for (std::size_t i = 0; i < moves.size(); ++i) {
        if (!(gains[i] > opts_.min_improvement)) continue;
        if (best == moves.size() || gains[i] > gains[best] ||
            (gains[i] == gains[best] && moves[i].key() < moves[best].key()))
          best = i;
      }
      if (best == moves.size()) return;
      apply(moves[best]);
      trace.push_back({restart, iteration, describe(moves[best], z_), score()});
    }
  }

 private:
  int bound() const { return s_.scorer->size_bound(); }

  bool can_take_parent(int v) const {
    const int k = static_cast<int>(s_.parents[v].size());
    return k < opts_.max_parents && k + 2 < bound();
  }

  std::vector<Move> candidate_moves() const {
    std::vector<Move> moves;
    const auto reach = reachability(s_.parents);
    for (int u = 0; u < q_; ++u)
      for (int v = 0; v < q_; ++v) {
        if (u == v) continue;
        const bool uv = std::binary_search(s_.parents[v].begin(), s_.parents[v].end(), u);
        const bool vu = std::binary_search(s_.parents[u].begin(), s_.parents[u].end(), v);
        if (!uv && !vu) {
          if (can_take_parent(v) && !reach[v][u]) moves.push_back({MoveKind::add_edge, u, v});
        } else if (uv) {
          moves.push_back({MoveKind::delete_edge, u, v});
          if (can_take_parent(u)) {
            bool other_path = false;
            for (int c = 0; c < q_ && !other_path; ++c)
              if (c != v && reach[c][v] &&
                  std::binary_search(s_.parents[c].begin(), s_.parents[c].end(), u))
                other_path = true;
            if (!other_path) moves.push_back({MoveKind::reverse_edge, u, v});
          }
        }
      }
    const int p = static_cast<int>(s_.preds.size());
    for (int k = 0; k < z_.size(); ++k) {
      const bool in = std::binary_search(s_.preds.begin(), s_.preds.end(), k);
      if (in)
        moves.push_back({MoveKind::drop_predictor, k, 0});
      else if (p < opts_.max_predictors)
        moves.push_back({MoveKind::add_predictor, k, 0});
    }
    return moves;
  }

  double gain(const Move& m) const {
    FamilyScorer& sc = *s_.scorer;
    const auto& pa = s_.parents;
    switch (m.kind) {
      case MoveKind::add_edge:
        return family_score(m.b, with(pa[m.b], m.a), sc) - s_.terms[m.b] + prior_.edge_delta();
      case MoveKind::delete_edge:
        return family_score(m.b, without(pa[m.b], m.a), sc) - s_.terms[m.b] - prior_.edge_delta();
      case MoveKind::reverse_edge:
        return family_score(m.b, without(pa[m.b], m.a), sc) +
               family_score(m.a, with(pa[m.a], m.b), sc) - s_.terms[m.b] - s_.terms[m.a];
      case MoveKind::add_predictor:
      case MoveKind::drop_predictor: {
        const auto preds = m.kind == MoveKind::add_predictor ? with(s_.preds, m.a)
                                                               : without(s_.preds, m.a);
        auto scorer = designs_.get(preds);
        if (!scorer) return kNegInf;
        return total_terms(pa, *scorer, nullptr) - s_.log_ml;
      }
    }
    return kNegInf;
  }

  void apply(const Move& m) {
    auto& pa = s_.parents;
    switch (m.kind) {
      case MoveKind::add_edge:
        pa[m.b] = with(pa[m.b], m.a);
        ++s_.edges;
        break;
      case MoveKind::delete_edge:
        pa[m.b] = without(pa[m.b], m.a);
        --s_.edges;
        break;
      case MoveKind::reverse_edge:
        pa[m.b] = without(pa[m.b], m.a);
        pa[m.a] = with(pa[m.a], m.b);
        break;
      case MoveKind::add_predictor:
        s_.preds = with(s_.preds, m.a);
        break;
      case MoveKind::drop_predictor:
        s_.preds = without(s_.preds, m.a);
        break;
    }
    s_.scorer = designs_.get(s_.preds);
    s_.log_ml = total_terms(pa, *s_.scorer, &s_.terms);
  }

  const ResponseMatrix& y_;
  const PredictorPool& z_;
  const ModelPrior& prior_;
  const GreedyOptions& opts_;
  DesignPool& designs_;
  int q_;
  ClimbState s_;
};

/// Random DAG consistent with a random vertex order, plus a random
/// predictor subset, for restarts after the first.
std::pair<std::vector<VertexList>, VertexList> random_start(int q, int p_star,
                                                            const GreedyOptions& opts,
                                                            int family_bound,
                                                            std::mt19937_64& rng) {
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const double edge_prob = q > 1 ? std::min(0.5, 2.0 / (q - 1)) : 0.0;
  std::bernoulli_distribution coin(edge_prob);
  std::vector<VertexList> parents(q);
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) {
      auto& pa = parents[order[j]];
      const int k = static_cast<int>(pa.size());
      if (coin(rng) && k < opts.max_parents && k + 2 < family_bound) pa.push_back(order[i]);
    }
  for (auto& pa : parents) std::sort(pa.begin(), pa.end());
  const int max_p = std::min(opts.max_predictors, p_star);
  std::uniform_int_distribution<int> count_dist(0, std::max(0, max_p));
  const int count = count_dist(rng);
  std::vector<int> pool(p_star);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  VertexList preds(pool.begin(), pool.begin() + count);
  std::sort(preds.begin(), preds.end());
  return {parents, preds};
}

}  // namespace

GreedyResult greedy_dag_search(const ResponseMatrix& y, const PredictorPool& z,
                               const FractionalConfig& config, const ModelPrior& prior,
                               const GreedyOptions& opts_in) {
  GreedyOptions opts = opts_in;
  const int n = y.n();
  const int q = y.q();
  if (z.values.rows() != n) throw DimensionError("predictor pool and responses differ in row count");
  if (opts.max_parents < 0 || opts.max_predictors < 0 || opts.restarts < 1)
    throw ConfigError("max_parents, max_predictors must be >= 0 and restarts >= 1");
  opts.max_predictors = std::min(opts.max_predictors, z.size());
  if (!(opts.max_parents < n - opts.max_predictors - 1)) {
    std::ostringstream os;
    os << "max_parents = " << opts.max_parents << " violates max_parents < n - max_predictors - 1 = "
       << n - opts.max_predictors - 1;
    throw ConfigError(os.str());
  }
  // Designs of different sizes must share n0 so that their scores refer to
  // the same n - n0 effective observations.
  const FractionalConfig joint =
      config.mode == FractionMode::recommended
          ? FractionalConfig::explicit_values(q - 1, opts.max_predictors + 2)
          : config;
  try {
    joint.resolve(n, opts.max_predictors, q);
  } catch (const ProprietyError& e) {
    throw ConfigError(std::string("fractional prior infeasible for the largest design: ") + e.what());
  }

  DesignPool designs(y, z, joint);
  GreedyResult result;
  result.effective_config = joint;
  bool have_best = false;
  for (int r = 0; r < opts.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint64_t>(opts.seed & 0xffffffffU),
                      static_cast<std::uint64_t>(opts.seed >> 32), static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    GreedyClimber climber(y, z, prior, opts, designs);
    bool ok;
    if (r == 0) {
      ok = climber.start(std::vector<VertexList>(q), {});
    } else {
      auto [parents, preds] = random_start(q, z.size(), opts, n - opts.max_predictors, rng);
      ok = climber.start(std::move(parents), std::move(preds));
      if (!ok) ok = climber.start(std::vector<VertexList>(q), {});
    }
    if (!ok) throw ValidationError("the empty graph cannot be scored on these data");
    std::vector<SearchStep> trace;
    climber.climb(r, trace, result.visited);
    const double s = climber.score();
    if (!have_best || s > result.best_score) {
      have_best = true;
      result.best_score = s;
      result.best_log_ml = climber.state().log_ml;
      result.best_graph = validate_dag(climber.state().parents);
      result.best_predictors = climber.state().preds;
    }
    result.trace.insert(result.trace.end(), trace.begin(), trace.end());
  }
  return result;
}

// ---------------------------------------------------------------------------
// MC3 over decomposable graphs

namespace {

SubsetKey edge_key(const Adjacency& g) {
  VertexList codes;
  int code = 0;
  for (int i = 0; i < g.q(); ++i)
    for (int j = i + 1; j < g.q(); ++j, ++code)
      if (g(i, j)) codes.push_back(code);
  return SubsetKey::of(codes);
}

struct ChainOutput {
  Mc3Result result;
  std::vector<std::pair<SubsetKey, long>> visits;  // ordered by first visit
  std::vector<Adjacency> visit_graphs;
  Matrix edge_counts;
};

ChainOutput run_chain(int q, const GraphScoreFn& log_score, const ModelPrior& prior,
                      const Mc3Options& opts, int chain) {
  std::seed_seq seq{static_cast<std::uint64_t>(opts.seed & 0xffffffffU),
                    static_cast<std::uint64_t>(opts.seed >> 32), static_cast<std::uint64_t>(chain),
                    std::uint64_t{0x6d6333}};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.empty() ? 0 : pairs.size() - 1);
  const int max_edges = max_edge_count(q);

  ChainOutput out;
  Mc3Result& res = out.result;
  Adjacency cur(q);
  DecomposableGraph cur_g = check_decomposable(cur);
  double cur_score = log_score(cur_g) + prior.log_prior(0, max_edges);
  res.best_graph = cur_g;
  res.best_score = cur_score;
  res.trace.push_back({chain, 0, "start", cur_score});
  out.edge_counts = Matrix::Zero(q, q);

  std::unordered_map<SubsetKey, std::size_t, SubsetKeyHash> index;
  auto record = [&](const Adjacency& g) {
    auto key = edge_key(g);
    auto [it, fresh] = index.try_emplace(key, out.visits.size());
    if (fresh) {
      out.visits.emplace_back(std::move(key), 0);
      out.visit_graphs.push_back(g);
    }
    ++out.visits[it->second].second;
    for (auto [i, j] : g.edges()) {
      out.edge_counts(i, j) += 1;
      out.edge_counts(j, i) += 1;
    }
  };

  for (long it = 1; it <= opts.iterations; ++it) {
    if (!pairs.empty()) {
      const auto [i, j] = pairs[pick(rng)];
      Adjacency next = cur;
      next.set(i, j, !cur(i, j));
      const double u = unif(rng);
      if (is_chordal(next)) {
        ++res.visited;
        DecomposableGraph g = check_decomposable(next);
        const double s = log_score(g) + prior.log_prior(next.edge_count(), max_edges);
        if (s != kNegInf && std::log(u) < (s - cur_score) / opts.temperature) {
          ++res.accepted;
          cur = std::move(next);
          cur_g = std::move(g);
          cur_score = s;
          if (s > res.best_score) {
            res.best_score = s;
            res.best_graph = cur_g;
            res.trace.push_back({chain, static_cast<int>(it), "best", s});
          }
        }
      }
    }
    record(cur);
  }
  res.final_states = {cur};
  return out;
}

}  // namespace

Mc3Result mc3_decomposable(int q, const GraphScoreFn& log_score, const ModelPrior& prior,
                           const Mc3Options& opts) {
  if (q < 1) throw ConfigError("mc3 needs at least one vertex");
  if (opts.iterations < 0 || opts.chains < 1 || !(opts.temperature > 0))
    throw ConfigError("mc3 needs iterations >= 0, chains >= 1 and temperature > 0");
  std::vector<ChainOutput> chains(opts.chains);
  parallel_for(chains.size(), [&](std::size_t c) {
    chains[c] = run_chain(q, log_score, prior, opts, static_cast<int>(c));
  });

  Mc3Result out = chains[0].result;
  out.trace.clear();
  out.final_states.clear();
  out.visited = out.accepted = 0;
  Matrix counts = Matrix::Zero(q, q);
  std::map<std::vector<std::uint64_t>, std::pair<long, std::size_t>> merged;  // key -> (visits, order)
  std::vector<const Adjacency*> graphs;
  for (auto& ch : chains) {
    const auto& r = ch.result;
    if (r.best_score > out.best_score) {
      out.best_score = r.best_score;
      out.best_graph = r.best_graph;
    }
    out.trace.insert(out.trace.end(), r.trace.begin(), r.trace.end());
    out.visited += r.visited;
    out.accepted += r.accepted;
    counts += ch.edge_counts;
    out.final_states.push_back(r.final_states.front());
    for (std::size_t k = 0; k < ch.visits.size(); ++k) {
      auto [it, fresh] = merged.try_emplace(ch.visits[k].first.words, 0, graphs.size());
      if (fresh) graphs.push_back(&ch.visit_graphs[k]);
      it->second.first += ch.visits[k].second;
    }
  }
  const double total = static_cast<double>(opts.iterations) * opts.chains;
  out.edge_frequency = total > 0 ? Matrix(counts / total) : Matrix(Matrix::Zero(q, q));
  out.distinct_states = static_cast<long>(merged.size());
  std::vector<std::pair<std::size_t, long>> by_order;
  for (const auto& [key, entry] : merged) by_order.emplace_back(entry.second, entry.first);
  std::sort(by_order.begin(), by_order.end());
  for (auto [order, visits] : by_order) out.visits.emplace_back(*graphs[order], visits);
  out.modal_graph = check_decomposable(Adjacency(q));
  out.modal_visits = 0;
  std::size_t modal_order = 0;
  for (const auto& [key, entry] : merged) {
    const auto [visits, order] = entry;
    if (visits > out.modal_visits || (visits == out.modal_visits && order < modal_order)) {
      out.modal_visits = visits;
      modal_order = order;
      out.modal_graph = check_decomposable(*graphs[order]);
    }
  }
  return out;
}

Mc3Result mc3_decomposable(const ResponseMatrix& y, const DesignMatrix& x,
                           const FractionalConfig& config, const ModelPrior& prior,
                           const Mc3Options& opts) {
  FamilyScorer scorer(config, y, x);
  return mc3_decomposable(
      y.q(), [&](const DecomposableGraph& g) { return decomposable_score(g, scorer); }, prior,
      opts);
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

ExhaustiveTable exhaustive_small(const ResponseMatrix& y, const DesignMatrix& x,
                                 const FractionalConfig& config, const ModelPrior& prior,
                                 EnumerationMode mode) {
  const int q = y.q();
  if (q > 5) throw ConfigError("exhaustive enumeration supports q <= 5, got q = " + std::to_string(q));
  FamilyScorer scorer(config, y, x);
  ExhaustiveTable table;
  table.mode = mode;
  const int max_edges = max_edge_count(q);
  if (mode == EnumerationMode::dag) {
    std::map<EquivalenceFingerprint, int> classes;
    int index = 0;
    for (auto& d : enumerate_dags(q)) {
      ExhaustiveRow row;
      row.index = index++;
      row.log_ml = dag_score(d, scorer);
      row.valid = row.log_ml != kNegInf;
      row.log_prior = prior.log_prior(d.edge_count(), max_edges);
      row.log_post = row.log_ml + row.log_prior;
      row.class_id =
          classes.try_emplace(fingerprint(d), static_cast<int>(classes.size())).first->second;
      row.graph = std::move(d);
      table.rows.push_back(std::move(row));
    }
    table.classes = static_cast<int>(classes.size());
  } else {
    int index = 0;
    for (const auto& adj : enumerate_decomposable(q)) {
      ExhaustiveRow row;
      row.index = index;
      row.class_id = index++;
      auto g = check_decomposable(adj);
      row.log_ml = decomposable_score(g, scorer);
      row.valid = row.log_ml != kNegInf;
      row.log_prior = prior.log_prior(adj.edge_count(), max_edges);
      row.log_post = row.log_ml + row.log_prior;
      row.graph = std::move(g);
      table.rows.push_back(std::move(row));
    }
    table.classes = index;
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ExhaustiveRow& a, const ExhaustiveRow& b) { return a.log_post > b.log_post; });
  return table;
}

}  // namespace dagscore
