#pragma once

// Fractional marginal likelihoods. The default prior
// p(B, Omega) ~ |Omega|^{(a_D - q - 1)/2} is turned into a proper
// matrix-normal-Wishart prior by spending a fraction b = n0 / n of the
// likelihood; the remaining (1 - b) of the likelihood is integrated against it.

#include "dagscore/mnw.hpp"

#include <span>
#include <string>
#include <string_view>

namespace dagscore {

enum class FractionMode { recommended, explicit_values };

/// Fraction settings after the sizes are known. The fraction b is kept as
/// the integer pair (n0, n).
struct ResolvedFraction {
  double a_d = 0;
  int n0 = 0;
  int n = 0;
  int p = 0;
  int q = 0;

  double log_fraction() const;
  /// Degrees of freedom of the full fractional prior, a_D + n0 - p - 1.
  double prior_dof() const { return a_d + n0 - p - 1; }
};

struct FractionalConfig {
  FractionMode mode = FractionMode::recommended;
  double a_d = 0;  // used in explicit mode only
  int n0 = 0;      // used in explicit mode only

  /// a_D = q - 1 and n0 = p + 2, which gives prior dof a = q.
  static FractionalConfig recommended() { return {}; }
  static FractionalConfig explicit_values(double a_d, int n0) {
    return {FractionMode::explicit_values, a_d, n0};
  }
  /// "recommended" or "a_d=F,n0=K". Throws ConfigError.
  static FractionalConfig parse(std::string_view text);
  std::string to_string() const;

  /// Checks a_D + n0 - p > q and 0 < n0 < n; throws ProprietyError.
  ResolvedFraction resolve(int n, int p, int q) const;
};

struct SubsetScore {
  VertexList subset;
  double log_ml = 0;
  bool valid = true;
  std::string reason;
};

/// Fractional prior as a matrix-normal-Wishart: (B^, n0 X^T X / n,
/// a_D + n0 - p - 1, n0 E^T E / n). Requires n > p + q for the full
/// q-dimensional prior.
MnwHyper fractional_hyper(const FractionalConfig& config, const SufficientStats& stats, int p,
                          int q);

/// Closed-form log m(Y_J) from the full residual cross-product. J must be
/// sorted, in range; J empty scores 0. |J| >= n - p gives valid = false.
SubsetScore fractional_subset_score(const ResolvedFraction& frac, const Matrix& ete,
                                    std::span<const int> subset);

/// Binds a fraction and one regression fit; scores column subsets by
/// principal-submatrix extraction. Immutable and thread-safe.
class FractionalEvaluator {
 public:
  FractionalEvaluator(const FractionalConfig& config, SufficientStats stats, int p);

  SubsetScore score(std::span<const int> subset) const;
  const ResolvedFraction& fraction() const { return frac_; }
  const SufficientStats& stats() const { return stats_; }

 private:
  SufficientStats stats_;
  ResolvedFraction frac_;
};

SubsetScore log_ml_subset(const FractionalConfig& config, const ResponseMatrix& y,
                          const DesignMatrix& x, std::span<const int> subset);

/// I.i.d. Gaussian case (intercept only, residuals about the column means).
SubsetScore log_ml_iid(const FractionalConfig& config, const ResponseMatrix& y,
                       std::span<const int> subset);

}  // namespace dagscore
