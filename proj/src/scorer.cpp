#include "dagscore/scorer.hpp"

#include <cmath>
#include <limits>

namespace dagscore {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

nlohmann::json one_based(const VertexList& v) {
  auto out = nlohmann::json::array();
  for (int x : v) out.push_back(x + 1);
  return out;
}

nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

Violation make_violation(const char* where, int vertex, const SubsetScore& s, int bound) {
  return {where, vertex, s.subset, bound, static_cast<int>(s.subset.size()), s.reason};
}

}  // namespace

const SubsetScore* ScoreCache::find(const SubsetKey& key) const {
  std::shared_lock lock(mutex_);
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : &it->second;
}

std::size_t ScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

FamilyScorer::FamilyScorer(const FractionalConfig& config, const ResponseMatrix& y,
                           const DesignMatrix& x)
    : eval_(config, compute_stats(y, x), x.p()) {}

FamilyScorer::FamilyScorer(const FractionalConfig& config, SufficientStats stats, int p)
    : eval_(config, std::move(stats), p) {}

const SubsetScore& FamilyScorer::score(std::span<const int> subset) {
  return cache_.get_or_insert(SubsetKey::of(subset), [&] { return eval_.score(subset); });
}

ScoreReport dag_log_ml(const Dag& d, FamilyScorer& scorer) {
  ScoreReport report;
  report.kind = GraphKind::dag;
  double total = 0;
  for (int j = 0; j < d.q(); ++j) {
    const VertexList fam = d.family(j);
    const SubsetScore& f = scorer.score(fam);
    const SubsetScore& pa = scorer.score(d.parents(j));
    if (!f.valid) report.violations.push_back(make_violation("family", j, f, scorer.size_bound()));
    if (!pa.valid)
      report.violations.push_back(make_violation("family", j, pa, scorer.size_bound()));
    report.per_vertex.push_back({j, fam, f.log_ml, pa.log_ml});
    total += f.log_ml - pa.log_ml;
  }
  report.valid = report.violations.empty();
  report.log_ml = report.valid ? total : kNegInf;
  return report;
}

ScoreReport dag_log_ml(const Dag& d, const FractionalConfig& config, const ResponseMatrix& y,
                       const DesignMatrix& x) {
  FamilyScorer scorer(config, y, x);
  return dag_log_ml(d, scorer);
}

ScoreReport decomposable_log_ml(const DecomposableGraph& g, FamilyScorer& scorer) {
  ScoreReport report;
  report.kind = GraphKind::decomposable;
  double total = 0;
  for (const auto& c : g.cliques) {
    const SubsetScore& s = scorer.score(c);
    if (!s.valid) report.violations.push_back(make_violation("clique", -1, s, scorer.size_bound()));
    report.per_clique.push_back({false, c, s.log_ml});
    total += s.log_ml;
  }
  for (const auto& sep : g.separators) {
    const SubsetScore& s = scorer.score(sep);
    if (!s.valid)
      report.violations.push_back(make_violation("separator", -1, s, scorer.size_bound()));
    report.per_clique.push_back({true, sep, s.log_ml});
    total -= s.log_ml;
  }
  report.valid = report.violations.empty();
  report.log_ml = report.valid ? total : kNegInf;
  return report;
}

ScoreReport decomposable_log_ml(const DecomposableGraph& g, const FractionalConfig& config,
                                const ResponseMatrix& y, const DesignMatrix& x) {
  FamilyScorer scorer(config, y, x);
  return decomposable_log_ml(g, scorer);
}

double family_score(int vertex, const VertexList& parents, FamilyScorer& scorer) {
  VertexList fam = parents;
  fam.insert(std::upper_bound(fam.begin(), fam.end(), vertex), vertex);
  const SubsetScore& f = scorer.score(fam);
  if (!f.valid) return kNegInf;
  const SubsetScore& pa = scorer.score(parents);
  if (!pa.valid) return kNegInf;
  return f.log_ml - pa.log_ml;
}

double dag_score(const Dag& d, FamilyScorer& scorer) {
  double total = 0;
  for (int j = 0; j < d.q(); ++j) {
    const double t = family_score(j, d.parents(j), scorer);
    if (t == kNegInf) return kNegInf;
    total += t;
  }
  return total;
}

double decomposable_score(const DecomposableGraph& g, FamilyScorer& scorer) {
  double total = 0;
  for (const auto& c : g.cliques) {
    const SubsetScore& s = scorer.score(c);
    if (!s.valid) return kNegInf;
    total += s.log_ml;
  }
  for (const auto& sep : g.separators) {
    const SubsetScore& s = scorer.score(sep);
    if (!s.valid) return kNegInf;
    total -= s.log_ml;
  }
  return total;
}

nlohmann::json dag_to_json(const Dag& d) {
  auto parents = nlohmann::json::array();
  for (int j = 0; j < d.q(); ++j) parents.push_back(one_based(d.parents(j)));
  return {{"type", "dag"}, {"q", d.q()}, {"parents", parents}};
}

nlohmann::json decomposable_to_json(const DecomposableGraph& g) {
  auto edges = nlohmann::json::array();
  for (auto [i, j] : g.adjacency.edges()) edges.push_back({i + 1, j + 1});
  auto cliques = nlohmann::json::array();
  for (const auto& c : g.cliques) cliques.push_back(one_based(c));
  auto seps = nlohmann::json::array();
  for (const auto& s : g.separators) seps.push_back(one_based(s));
  return {{"type", "decomposable"}, {"q", g.q()},         {"edges", edges},
          {"cliques", cliques},     {"separators", seps}};
}

nlohmann::json report_to_json(const ScoreReport& report, const nlohmann::json& graph) {
  nlohmann::json out;
  out["graph"] = graph;
  out["kind"] = report.kind == GraphKind::dag ? "dag" : "decomposable";
  out["log_ml"] = finite_or_null(report.log_ml);
  out["valid"] = report.valid;
  auto terms = nlohmann::json::array();
  if (report.kind == GraphKind::dag) {
    for (const auto& t : report.per_vertex)
      terms.push_back({{"vertex", t.vertex + 1},
                       {"family", one_based(t.family)},
                       {"family_log_ml", finite_or_null(t.family_log_ml)},
                       {"parent_log_ml", finite_or_null(t.parent_log_ml)}});
  } else {
    for (const auto& t : report.per_clique)
      terms.push_back({{"kind", t.separator ? "separator" : "clique"},
                       {"set", one_based(t.set)},
                       {"log_ml", finite_or_null(t.log_ml)}});
  }
  out[report.kind == GraphKind::dag ? "per_vertex" : "per_clique"] = terms;
  auto viol = nlohmann::json::array();
  for (const auto& v : report.violations) {
    nlohmann::json item{{"where", v.where},   {"set", one_based(v.set)}, {"bound", v.bound},
                        {"actual", v.actual}, {"reason", v.reason}};
    item["vertex"] = v.vertex >= 0 ? nlohmann::json(v.vertex + 1) : nlohmann::json(nullptr);
    viol.push_back(std::move(item));
  }
  out["violations"] = viol;
  return out;
}

}  // namespace dagscore
