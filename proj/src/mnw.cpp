#include "dagscore/mnw.hpp"

#include "dagscore/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace dagscore {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

std::vector<std::string> default_labels(const char* prefix, Eigen::Index count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (Eigen::Index j = 0; j < count; ++j) out.push_back(prefix + std::to_string(j + 1));
  return out;
}

void require_finite(const Matrix& m, const char* what) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (!std::isfinite(m(r, c))) {
        std::ostringstream os;
        os << what << " has a non-finite entry at row " << r + 1 << ", column " << c + 1;
        throw ValidationError(os.str());
      }
}

}  // namespace

ResponseMatrix::ResponseMatrix(Matrix values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw DimensionError("response matrix needs at least one row and one column");
  if (static_cast<Eigen::Index>(labels_.size()) != values_.cols())
    throw DimensionError("response labels do not match the number of columns");
  std::set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw ValidationError("duplicate response label '" + l + "'");
  require_finite(values_, "response matrix");
}

ResponseMatrix::ResponseMatrix(Matrix values)
    : ResponseMatrix(values, default_labels("y", values.cols())) {}

DesignMatrix::DesignMatrix(Matrix values, std::vector<std::string> predictor_labels)
    : values_(std::move(values)), labels_(std::move(predictor_labels)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw DimensionError("design matrix needs at least one row and the intercept column");
  if (static_cast<Eigen::Index>(labels_.size()) != values_.cols() - 1)
    throw DimensionError("predictor labels do not match the number of predictor columns");
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    if (values_(i, 0) != 1.0)
      throw ValidationError("first design column must be the unit vector (row " +
                            std::to_string(i + 1) + ")");
  require_finite(values_, "design matrix");
}

DesignMatrix DesignMatrix::with_intercept(const Matrix& predictors,
                                          std::vector<std::string> predictor_labels) {
  Matrix x(predictors.rows(), predictors.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(predictors.cols()) = predictors;
  return DesignMatrix(std::move(x), std::move(predictor_labels));
}

DesignMatrix DesignMatrix::intercept_only(int n) {
  return DesignMatrix(Matrix::Ones(n, 1), {});
}

void MnwHyper::validate() const {
  const auto m = c_prec.rows();
  const auto qq = r_scale.rows();
  if (c_prec.cols() != m || r_scale.cols() != qq || b_mean.rows() != m || b_mean.cols() != qq)
    throw DimensionError("inconsistent matrix-normal-Wishart hyperparameter dimensions");
  if (!log_det_spd(c_prec)) throw NotSpdError("C is not symmetric positive definite");
  if (!log_det_spd(r_scale)) throw NotSpdError("R is not symmetric positive definite");
  if (!(dof > static_cast<double>(qq) - 1.0)) {
    std::ostringstream os;
    os << "Wishart degrees of freedom " << dof << " must exceed q - 1 = " << qq - 1;
    throw ProprietyError(os.str());
  }
}

double log_multigamma(int q, double x) {
  if (q < 1) throw DomainError("multivariate gamma needs dimension q >= 1");
  if (!(x > 0.5 * (q - 1))) {
    std::ostringstream os;
    os << "log_multigamma(" << q << ", " << x << "): argument must exceed (q-1)/2";
    throw DomainError(os.str());
  }
  double out = 0.25 * q * (q - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= q; ++j) out += std::lgamma(x + 0.5 * (1 - j));
  return out;
}

SufficientStats compute_stats(const ResponseMatrix& y, const DesignMatrix& x) {
  if (y.n() != x.n())
    throw DimensionError("response has " + std::to_string(y.n()) + " rows but design has " +
                         std::to_string(x.n()));
  const Matrix& xv = x.values();
  SufficientStats s;
  s.n = y.n();
  s.xtx = symmetrized(xv.transpose() * xv);
  const auto piv = cholesky_with_pivots(s.xtx, kRankPivotTolerance);
  if (!piv.dependent.empty()) {
    std::ostringstream os;
    os << "design matrix is rank deficient; dependent column(s):";
    for (int c : piv.dependent)
      os << ' ' << (c == 0 ? std::string("intercept") : x.predictor_labels()[c - 1]);
    throw RankDeficientError(os.str(), piv.dependent);
  }
  s.xty = xv.transpose() * y.values();
  Eigen::LLT<Matrix> llt(s.xtx);
  s.bhat = llt.solve(s.xty);
  const Matrix resid = y.values() - xv * s.bhat;
  s.ete = symmetrized(resid.transpose() * resid);
  return s;
}

double log_norm_const(const MnwHyper& hyper) {
  const int m = hyper.rows();
  const int q = hyper.q();
  const double a = hyper.dof;
  const double ld_c = log_det_spd_or_throw(hyper.c_prec, "C");
  const double ld_r = log_det_spd_or_throw(hyper.r_scale, "R");
  return 0.5 * q * m * kLog2Pi + 0.5 * a * q * std::numbers::ln2 +
         log_multigamma(q, 0.5 * a) - 0.5 * q * ld_c - 0.5 * a * ld_r;
}

MnwHyper posterior_update(const MnwHyper& hyper, const SufficientStats& stats) {
  if (hyper.rows() != stats.rows() || hyper.q() != stats.q())
    throw DimensionError("hyperparameters and sufficient statistics disagree in shape");
  MnwHyper post;
  post.c_prec = symmetrized(hyper.c_prec + stats.xtx);
  Eigen::LLT<Matrix> llt(post.c_prec);
  if (llt.info() != Eigen::Success) throw NotSpdError("C + X^T X is not symmetric positive definite");
  post.b_mean = llt.solve(stats.xty + hyper.c_prec * hyper.b_mean);
  // {C^{-1} + (X^T X)^{-1}}^{-1} = C (C + X^T X)^{-1} X^T X
  const Matrix delta = hyper.b_mean - stats.bhat;
  const Matrix d = delta.transpose() * hyper.c_prec * llt.solve(stats.xtx * delta);
  post.r_scale = symmetrized(hyper.r_scale + stats.ete + d);
  post.dof = hyper.dof + stats.n;
  return post;
}

Matrix discrepancy_direct(const MnwHyper& hyper, const SufficientStats& stats) {
  const Matrix delta = hyper.b_mean - stats.bhat;
  const Matrix middle = (hyper.c_prec.inverse() + stats.xtx.inverse()).inverse();
  return symmetrized(delta.transpose() * middle * delta);
}

double log_marginal_full(const MnwHyper& hyper, const SufficientStats& stats) {
  hyper.validate();
  const MnwHyper post = posterior_update(hyper, stats);
  post.validate();
  return log_norm_const(post) - log_norm_const(hyper) - 0.5 * stats.n * hyper.q() * kLog2Pi;
}

MnwHyper subset_hyper(const MnwHyper& hyper, std::span<const int> subset) {
  const int q = hyper.q();
  if (subset.empty()) throw DimensionError("subset_hyper needs a nonempty vertex subset");
  for (int v : subset)
    if (v < 0 || v >= q) throw DimensionError("subset vertex out of range");
  const int size = static_cast<int>(subset.size());
  const int dropped = q - size;
  MnwHyper out;
  out.b_mean = select_columns(hyper.b_mean, subset);
  out.c_prec = hyper.c_prec;
  out.dof = hyper.dof - dropped;
  out.r_scale = principal_submatrix(hyper.r_scale, subset);
  if (!(out.dof > size - 1)) {
    std::ostringstream os;
    os << "reduced degrees of freedom " << out.dof << " must exceed |J| - 1 = " << size - 1;
    throw ProprietyError(os.str());
  }
  return out;
}

SufficientStats subset_stats(const SufficientStats& stats, std::span<const int> subset) {
  SufficientStats out;
  out.n = stats.n;
  out.xtx = stats.xtx;
  out.xty = select_columns(stats.xty, subset);
  out.bhat = select_columns(stats.bhat, subset);
  out.ete = principal_submatrix(stats.ete, subset);
  return out;
}

double log_likelihood(const ResponseMatrix& y, const DesignMatrix& x, const Matrix& b,
                      const Matrix& omega) {
  const Matrix resid = y.values() - x.values() * b;
  const double ld = log_det_spd_or_throw(omega, "Omega");
  const double quad = (omega * resid.transpose() * resid).trace();
  return 0.5 * y.n() * ld - 0.5 * y.n() * y.q() * kLog2Pi - 0.5 * quad;
}

double log_mnw_density(const MnwHyper& hyper, const Matrix& b, const Matrix& omega) {
  const int m = hyper.rows();
  const int q = hyper.q();
  const double ld = log_det_spd_or_throw(omega, "Omega");
  const Matrix dev = b - hyper.b_mean;
  const double quad = (omega * (dev.transpose() * hyper.c_prec * dev + hyper.r_scale)).trace();
  return 0.5 * (m + hyper.dof - q - 1) * ld - log_norm_const(hyper) - 0.5 * quad;
}

}  // namespace dagscore
