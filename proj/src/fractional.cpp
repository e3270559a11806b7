#include "dagscore/fractional.hpp"

#include "dagscore/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dagscore {

double ResolvedFraction::log_fraction() const {
  return std::log(static_cast<double>(n0)) - std::log(static_cast<double>(n));
}

FractionalConfig FractionalConfig::parse(std::string_view text) {
  if (text == "recommended") return recommended();
  FractionalConfig out{FractionMode::explicit_values, 0.0, 0};
  bool have_a = false, have_n0 = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("bad fraction setting '" + std::string(item) + "'");
    const auto key = item.substr(0, eq);
    const std::string value(item.substr(eq + 1));
    char* end = nullptr;
    if (key == "a_d") {
      out.a_d = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0') throw ConfigError("bad a_d value '" + value + "'");
      have_a = true;
    } else if (key == "n0") {
      const long v = std::strtol(value.c_str(), &end, 10);
      if (value.empty() || *end != '\0') throw ConfigError("bad n0 value '" + value + "'");
      out.n0 = static_cast<int>(v);
      have_n0 = true;
    } else {
      throw ConfigError("unknown fraction key '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (!have_a || !have_n0)
    throw ConfigError("fraction must be 'recommended' or 'a_d=F,n0=K'");
  return out;
}

std::string FractionalConfig::to_string() const {
  if (mode == FractionMode::recommended) return "recommended";
  std::ostringstream os;
  os.precision(17);
  os << "a_d=" << a_d << ",n0=" << n0;
  return os.str();
}

ResolvedFraction FractionalConfig::resolve(int n, int p, int q) const {
  ResolvedFraction r;
  r.n = n;
  r.p = p;
  r.q = q;
  if (mode == FractionMode::recommended) {
    r.a_d = q - 1;
    r.n0 = p + 2;
  } else {
    r.a_d = a_d;
    r.n0 = n0;
  }
  if (r.n0 <= 0 || r.n0 >= n) {
    std::ostringstream os;
    os << "training size n0 = " << r.n0 << " must satisfy 0 < n0 < n = " << n;
    throw ProprietyError(os.str());
  }
  const double lhs = r.a_d + r.n0 - p;
  if (!(lhs > q)) {
    std::ostringstream os;
    os << "condition i) a_D + n0 - p > q fails: " << lhs << " <= " << q << " (short by "
       << q - lhs << ")";
    throw ProprietyError(os.str());
  }
  return r;
}

MnwHyper fractional_hyper(const FractionalConfig& config, const SufficientStats& stats, int p,
                          int q) {
  if (stats.rows() != p + 1 || stats.q() != q)
    throw DimensionError("sufficient statistics do not match p and q");
  const ResolvedFraction frac = config.resolve(stats.n, p, q);
  if (!(stats.n > p + q)) {
    std::ostringstream os;
    os << "condition ii) n > p + q fails: n = " << stats.n << ", p + q = " << p + q
       << " (short by " << p + q - stats.n + 1 << ")";
    throw ProprietyError(os.str());
  }
  const double b = static_cast<double>(frac.n0) / frac.n;
  MnwHyper h;
  h.b_mean = stats.bhat;
  h.c_prec = b * stats.xtx;
  h.dof = frac.prior_dof();
  h.r_scale = b * stats.ete;
  if (!log_det_spd(h.r_scale))
    throw NotSpdError("fractional prior scale n0 E^T E / n is not positive definite");
  return h;
}

SubsetScore fractional_subset_score(const ResolvedFraction& frac, const Matrix& ete,
                                    std::span<const int> subset) {
  SubsetScore out;
  out.subset.assign(subset.begin(), subset.end());
  const int k = static_cast<int>(subset.size());
  if (k == 0) return out;
  for (int i = 0; i < k; ++i) {
    if (subset[i] < 0 || subset[i] >= frac.q) throw DimensionError("subset vertex out of range");
    if (i > 0 && subset[i] <= subset[i - 1]) throw DimensionError("subset must be sorted and unique");
  }
  const int bound = frac.n - frac.p;
  if (k >= bound) {
    out.valid = false;
    out.log_ml = -std::numeric_limits<double>::infinity();
    out.reason = "subset size " + std::to_string(k) + " violates |J| < n - p = " + std::to_string(bound);
    return out;
  }
  const auto ld = log_det_spd(principal_submatrix(ete, subset));
  if (!ld) {
    out.valid = false;
    out.log_ml = -std::numeric_limits<double>::infinity();
    out.reason = "residual cross-product of the subset is not positive definite";
    return out;
  }
  const int dropped = frac.q - k;
  const double n = frac.n, n0 = frac.n0, p = frac.p;
  const double spent = n - n0;
  out.log_ml = -0.5 * spent * k * std::log(std::numbers::pi) +
               log_multigamma(k, 0.5 * (frac.a_d + n - p - 1 - dropped)) -
               log_multigamma(k, 0.5 * (frac.a_d + n0 - p - 1 - dropped)) +
               0.5 * k * (frac.a_d + n0 - dropped) * frac.log_fraction() - 0.5 * spent * *ld;
  return out;
}

FractionalEvaluator::FractionalEvaluator(const FractionalConfig& config, SufficientStats stats,
                                         int p)
    : stats_(std::move(stats)), frac_(config.resolve(stats_.n, p, stats_.q())) {
  if (stats_.rows() != p + 1) throw DimensionError("sufficient statistics do not match p");
}

SubsetScore FractionalEvaluator::score(std::span<const int> subset) const {
  return fractional_subset_score(frac_, stats_.ete, subset);
}

SubsetScore log_ml_subset(const FractionalConfig& config, const ResponseMatrix& y,
                          const DesignMatrix& x, std::span<const int> subset) {
  const FractionalEvaluator eval(config, compute_stats(y, x), x.p());
  return eval.score(subset);
}

SubsetScore log_ml_iid(const FractionalConfig& config, const ResponseMatrix& y,
                       std::span<const int> subset) {
  const Matrix& v = y.values();
  const Matrix centered = v.rowwise() - v.colwise().mean();
  const Matrix ete = symmetrized(centered.transpose() * centered);
  return fractional_subset_score(config.resolve(y.n(), 0, y.q()), ete, subset);
}

}  // namespace dagscore
