#pragma once

// Matrix-normal-Wishart conjugate machinery for the Gaussian multivariate
// regression Y = X B + E, rows of E ~ N_q(0, Omega^{-1}).
//
// Wishart convention: Omega ~ W_q(a, R) has density proportional to
// |Omega|^{(a-q-1)/2} exp(-tr(Omega R)/2), so E[Omega] = a R^{-1}.
// Every probability quantity is returned in log space.

#include "dagscore/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace dagscore {

/// n x q response matrix with unique column labels and finite entries.
class ResponseMatrix {
 public:
  ResponseMatrix(Matrix values, std::vector<std::string> labels);
  /// Labels default to y1..yq.
  explicit ResponseMatrix(Matrix values);

  int n() const { return static_cast<int>(values_.rows()); }
  int q() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  Matrix values_;
  std::vector<std::string> labels_;
};

/// n x (p+1) design matrix whose first column is exactly the unit vector.
/// Full column rank is verified by compute_stats, which is where the
/// factorization happens anyway.
class DesignMatrix {
 public:
  DesignMatrix(Matrix values, std::vector<std::string> predictor_labels);

  /// [1_n | predictors].
  static DesignMatrix with_intercept(const Matrix& predictors,
                                     std::vector<std::string> predictor_labels);
  static DesignMatrix intercept_only(int n);

  int n() const { return static_cast<int>(values_.rows()); }
  /// Number of predictors, excluding the intercept.
  int p() const { return static_cast<int>(values_.cols()) - 1; }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& predictor_labels() const { return labels_; }

 private:
  Matrix values_;
  std::vector<std::string> labels_;
};

/// Hyperparameters (B_, C, a, R) of B | Omega ~ MN(B_, C^{-1}, Omega^{-1}),
/// Omega ~ W_q(a, R).
struct MnwHyper {
  Matrix b_mean;   // (p+1) x q
  Matrix c_prec;   // (p+1) x (p+1), s.p.d.
  double dof = 0;  // > q - 1
  Matrix r_scale;  // q x q, s.p.d.

  int rows() const { return static_cast<int>(c_prec.rows()); }
  int q() const { return static_cast<int>(r_scale.rows()); }

  /// Throws DimensionError / NotSpdError / ProprietyError.
  void validate() const;
};

struct SufficientStats {
  Matrix xtx;   // X^T X
  Matrix xty;   // X^T Y
  Matrix bhat;  // least squares B^
  Matrix ete;   // residual cross-product E^T E (symmetrized)
  int n = 0;

  int rows() const { return static_cast<int>(xtx.rows()); }
  int q() const { return static_cast<int>(ete.rows()); }
};

/// Relative pivot threshold used to declare X rank deficient.
inline constexpr double kRankPivotTolerance = 1e-10;

/// log Gamma_q(x); throws DomainError unless x > (q-1)/2.
double log_multigamma(int q, double x);

/// Least squares fit through a Cholesky factor of X^T X. Throws
/// RankDeficientError listing dependent design columns.
SufficientStats compute_stats(const ResponseMatrix& y, const DesignMatrix& x);

/// log K(C, R, a) with K the matrix-normal-Wishart normalizing constant.
double log_norm_const(const MnwHyper& hyper);

/// Conjugate update (B_, C, a, R) -> (B-, C + X^T X, a + n, R + E^T E + D).
MnwHyper posterior_update(const MnwHyper& hyper, const SufficientStats& stats);

/// The discrepancy term D computed literally as
/// (B_ - B^)^T {C^{-1} + (X^T X)^{-1}}^{-1} (B_ - B^), with explicit
/// inverses. Kept for cross-checking the solve-based update.
Matrix discrepancy_direct(const MnwHyper& hyper, const SufficientStats& stats);

/// log m(Y) = log K(posterior) - log K(prior) - (nq/2) log(2 pi).
double log_marginal_full(const MnwHyper& hyper, const SufficientStats& stats);

/// Induced prior for (B_J, Omega_{JJ.J-bar}): (B_J, C, a - |J-bar|, R_JJ).
MnwHyper subset_hyper(const MnwHyper& hyper, std::span<const int> subset);

/// Column subset of the sufficient statistics (B^_J, (E^T E)_JJ).
SufficientStats subset_stats(const SufficientStats& stats, std::span<const int> subset);

/// log f(Y | B, Omega) evaluated from the raw residuals Y - X B.
double log_likelihood(const ResponseMatrix& y, const DesignMatrix& x, const Matrix& b,
                      const Matrix& omega);

/// log p(B, Omega) under the matrix-normal-Wishart density with `hyper`.
double log_mnw_density(const MnwHyper& hyper, const Matrix& b, const Matrix& omega);

}  // namespace dagscore
