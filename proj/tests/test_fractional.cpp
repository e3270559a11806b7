#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dagscore/errors.hpp"
#include "dagscore/fractional.hpp"
#include "dagscore/linalg.hpp"
#include "mc_oracle.hpp"
#include "samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace dagscore;
using testsupport::Rng;

namespace {

// Fractional prior built from the library, then the generic conjugate
// marginal with every statistic scaled by 1 - b and n - n0 observations.
double two_stage(const FractionalConfig& cfg, const SufficientStats& stats, int p,
                 const VertexList& j) {
  const int q = stats.q();
  const auto frac = cfg.resolve(stats.n, p, q);
  const auto hyper = subset_hyper(fractional_hyper(cfg, stats, p, q), j);
  const double keep = 1.0 - static_cast<double>(frac.n0) / frac.n;
  auto sub = subset_stats(stats, j);
  sub.xtx *= keep;
  sub.xty *= keep;
  sub.ete *= keep;
  sub.n = frac.n - frac.n0;
  return log_marginal_full(hyper, sub);
}

std::vector<VertexList> all_nonempty_subsets(int q) {
  std::vector<VertexList> out;
  for (int mask = 1; mask < (1 << q); ++mask) {
    VertexList s;
    for (int v = 0; v < q; ++v)
      if (mask & (1 << v)) s.push_back(v);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("recommended fraction for p = 2, q = 3") {
  const auto r = FractionalConfig::recommended().resolve(20, 2, 3);
  CHECK(r.a_d == 2);
  CHECK(r.n0 == 4);
  CHECK(r.prior_dof() == 3);
}

TEST_CASE("recommended prior degrees of freedom equal q") {
  for (int q = 1; q <= 6; ++q)
    for (int p = 0; p <= 4; ++p) CHECK(FractionalConfig::recommended().resolve(40, p, q).prior_dof() == q);
}

TEST_CASE("config parsing round trips") {
  CHECK(FractionalConfig::parse("recommended").mode == FractionMode::recommended);
  const auto e = FractionalConfig::parse("a_d=1.5,n0=7");
  CHECK(e.mode == FractionMode::explicit_values);
  CHECK(e.a_d == 1.5);
  CHECK(e.n0 == 7);
  CHECK(FractionalConfig::parse(e.to_string()).n0 == 7);
  CHECK(FractionalConfig::parse(e.to_string()).a_d == 1.5);
  CHECK_THROWS_AS(FractionalConfig::parse("n0=3"), ConfigError);
  CHECK_THROWS_AS(FractionalConfig::parse("a_d=x,n0=3"), ConfigError);
  CHECK_THROWS_AS(FractionalConfig::parse("fancy"), ConfigError);
}

TEST_CASE("propriety conditions are enforced with informative messages") {
  // a_D + n0 - p > q
  try {
    FractionalConfig::explicit_values(0, 3).resolve(30, 1, 3);
    FAIL("expected ProprietyError");
  } catch (const ProprietyError& e) {
    CHECK(std::string(e.what()).find("short by") != std::string::npos);
  }
  CHECK_NOTHROW(FractionalConfig::explicit_values(0, 5).resolve(30, 1, 3));
  CHECK_THROWS_AS(FractionalConfig::explicit_values(2, 30).resolve(30, 1, 3), ProprietyError);
  CHECK_THROWS_AS(FractionalConfig::explicit_values(2, 0).resolve(30, 1, 3), ProprietyError);

  // n > p + q for the full fractional prior
  Rng rng(1);
  auto [y, x] = testsupport::random_dataset(rng, 5, 4, 1);
  const auto stats = compute_stats(y, x);
  try {
    fractional_hyper(FractionalConfig::recommended(), stats, 1, 4);
    FAIL("expected ProprietyError");
  } catch (const ProprietyError& e) {
    CHECK(std::string(e.what()).find("condition ii)") != std::string::npos);
  }
}

TEST_CASE("fractional hyperparameters") {
  Rng rng(2);
  auto [y, x] = testsupport::random_dataset(rng, 20, 3, 2);
  const auto stats = compute_stats(y, x);
  const auto h = fractional_hyper(FractionalConfig::recommended(), stats, 2, 3);
  CHECK(h.dof == 3);
  CHECK((h.c_prec - 0.2 * stats.xtx).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h.r_scale - 0.2 * stats.ete).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h.b_mean - stats.bhat).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("closed form agrees with the two-stage conjugate route") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int q = 1 + trial % 4, p = trial % 3, n = p + q + 3 + trial % 5;
    auto [y, x] = testsupport::random_dataset(rng, n, q, p);
    const auto stats = compute_stats(y, x);
    const auto cfg = trial % 2 ? FractionalConfig::recommended()
                               : FractionalConfig::explicit_values(q - 0.5, p + 3);
    const FractionalEvaluator eval(cfg, stats, p);
    for (const auto& j : all_nonempty_subsets(q)) {
      const auto s = eval.score(j);
      REQUIRE(s.valid);
      CHECK(s.log_ml == doctest::Approx(two_stage(cfg, stats, p, j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("empty subset scores zero and oversized subsets are invalid") {
  Rng rng(4);
  auto [y, x] = testsupport::random_dataset(rng, 6, 6, 1);
  const auto stats = compute_stats(y, x);
  const FractionalEvaluator eval(FractionalConfig::recommended(), stats, 1);
  CHECK(eval.score({}).log_ml == 0);
  CHECK(eval.score({}).valid);
  const VertexList four = {0, 1, 2, 3}, five = {0, 1, 2, 3, 4};
  CHECK(eval.score(four).valid);
  CHECK(std::isfinite(eval.score(four).log_ml));
  const auto bad = eval.score(five);
  CHECK_FALSE(bad.valid);
  CHECK(bad.log_ml == -std::numeric_limits<double>::infinity());
  CHECK(bad.reason.find("n - p") != std::string::npos);
  const VertexList unsorted = {2, 1};
  CHECK_THROWS_AS(eval.score(unsorted), DimensionError);
}

TEST_CASE("rescaling responses shifts the score by -(n - n0)|J| log s") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto [y, x] = testsupport::random_dataset(rng, 14, 3, 1);
    const double s = 0.3 + 0.4 * trial;
    const ResponseMatrix ys(y.values() * s);
    for (const auto& j : all_nonempty_subsets(3)) {
      const double base = log_ml_subset(FractionalConfig::recommended(), y, x, j).log_ml;
      const double scaled = log_ml_subset(FractionalConfig::recommended(), ys, x, j).log_ml;
      const double n0 = 3;
      CHECK(scaled - base == doctest::Approx(-(14 - n0) * j.size() * std::log(s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("joint row permutations leave scores unchanged") {
  Rng rng(6);
  auto [y, x] = testsupport::random_dataset(rng, 11, 3, 2);
  std::vector<int> perm(11);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const ResponseMatrix yp(select_rows(y.values(), perm));
  const DesignMatrix xp(select_rows(x.values(), perm), x.predictor_labels());
  for (const auto& j : all_nonempty_subsets(3))
    CHECK(log_ml_subset(FractionalConfig::recommended(), yp, xp, j).log_ml ==
          doctest::Approx(log_ml_subset(FractionalConfig::recommended(), y, x, j).log_ml).epsilon(1e-11));
}

TEST_CASE("i.i.d. case equals the intercept-only regression") {
  Rng rng(7);
  const ResponseMatrix y(testsupport::standard_normal(rng, 10, 3));
  for (const auto& j : all_nonempty_subsets(3))
    CHECK(log_ml_iid(FractionalConfig::recommended(), y, j).log_ml ==
          doctest::Approx(log_ml_subset(FractionalConfig::recommended(), y, DesignMatrix::intercept_only(10), j).log_ml)
              .epsilon(1e-11));
}

TEST_CASE("Monte Carlo oracle brackets the closed form on a small case") {
  Rng rng(8);
  auto [y, x] = testsupport::random_dataset(rng, 7, 2, 1);
  const auto setup = testsupport::fractional_setup(y, x, 1.0, 3);
  for (const VertexList& j : {VertexList{0}, VertexList{0, 1}}) {
    const auto mc = testsupport::mc_log_ml_subset(setup, y, x, j, 200000, rng);
    const double exact = log_ml_subset(FractionalConfig::recommended(), y, x, j).log_ml;
    CHECK(std::abs(mc.log_mean - exact) < 4 * mc.se);
  }
}

TEST_CASE("Monte Carlo standard error shrinks like one over root draws") {
  Rng rng(9);
  auto [y, x] = testsupport::random_dataset(rng, 8, 1, 0);
  const auto setup = testsupport::fractional_setup(y, x, 0.0, 2);
  const VertexList j = {0};
  double ratio = 0;
  const int reps = 5;
  for (int r = 0; r < reps; ++r) {
    const auto small = testsupport::mc_log_ml_subset(setup, y, x, j, 50000, rng);
    const auto large = testsupport::mc_log_ml_subset(setup, y, x, j, 100000, rng);
    ratio += large.se / small.se / reps;
  }
  CHECK(ratio == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.2));
}
