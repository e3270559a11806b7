#pragma once

// Monte Carlo reference values for fractional marginal likelihoods: draws
// parameters from the fractional prior and averages the (1 - b)-power
// likelihood. Built from Eigen's QR least squares, independent of the
// library's closed forms.

#include "samplers.hpp"

#include "dagscore/graphs.hpp"

namespace testsupport {

struct McEstimate {
  double log_mean = 0;
  double se = 0;  // grouped jackknife standard error
};

struct FractionalSetup {
  Matrix bhat;   // (p+1) x q
  Matrix c_prec; // (n0/n) X'X
  Matrix r_full; // (n0/n) E'E
  double dof = 0;  // a_D + n0 - p - 1
  double power = 0;  // 1 - n0/n
};

FractionalSetup fractional_setup(const dagscore::ResponseMatrix& y, const dagscore::DesignMatrix& x,
                                 double a_d, int n0);

/// log m(Y_J) by sampling (B_J, Omega_{JJ.J-bar}).
McEstimate mc_log_ml_subset(const FractionalSetup& s, const dagscore::ResponseMatrix& y,
                            const dagscore::DesignMatrix& x, const dagscore::VertexList& subset,
                            long draws, Rng& rng, int groups = 100);

/// log m_D(Y) as a sum over vertices of log E[prod_i f(y_ij | y_i pa(j), theta_j)^(1-b)],
/// with theta_j = (alpha_j, gamma_j, lambda_j) derived from draws of
/// (B_F, Omega_{FF.F-bar}) for the family F of j.
McEstimate mc_dag_log_ml(const FractionalSetup& s, const dagscore::ResponseMatrix& y,
                         const dagscore::DesignMatrix& x, const dagscore::Dag& d, long draws,
                         Rng& rng, int groups = 100);

/// log of the mean of exp(w) with a grouped jackknife standard error.
McEstimate log_mean_exp(const std::vector<double>& w, int groups);

}  // namespace testsupport
