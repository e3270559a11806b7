#include "dagscore/linalg.hpp"

#include "dagscore/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dagscore {

std::optional<double> log_det_spd(const Matrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  if (a.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto diag = llt.matrixLLT().diagonal();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) return std::nullopt;
    sum += std::log(diag[i]);
  }
  return 2.0 * sum;
}

double log_det_spd_or_throw(const Matrix& a, const char* what) {
  auto ld = log_det_spd(a);
  if (!ld) throw NotSpdError(std::string(what) + " is not symmetric positive definite");
  return *ld;
}

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix principal_submatrix(const Matrix& a, std::span<const int> idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = a(idx[r], idx[c]);
  return out;
}

Matrix select_columns(const Matrix& a, std::span<const int> idx) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(c) = a.col(idx[c]);
  return out;
}

Matrix select_rows(const Matrix& a, std::span<const int> idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(r) = a.row(idx[r]);
  return out;
}

PivotedCholesky cholesky_with_pivots(const Matrix& a, double rel_tol) {
  const Eigen::Index m = a.rows();
  PivotedCholesky out;
  out.lower = Matrix::Zero(m, m);
  out.pivots.assign(m, 0.0);
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) max_diag = std::max(max_diag, a(i, i));
  const double threshold = rel_tol * max_diag;

  Matrix& l = out.lower;
  std::vector<bool> skip(m, false);
  for (Eigen::Index j = 0; j < m; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k)
      if (!skip[k]) d -= l(j, k) * l(j, k);
    out.pivots[j] = d;
    if (!(d > threshold)) {
      skip[j] = true;
      out.dependent.push_back(static_cast<int>(j));
      continue;
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < m; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k)
        if (!skip[k]) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return out;
}

VertexList complement(std::span<const int> subset, int q) {
  std::vector<bool> in(q, false);
  for (int v : subset) in[v] = true;
  VertexList out;
  out.reserve(q - subset.size());
  for (int v = 0; v < q; ++v)
    if (!in[v]) out.push_back(v);
  return out;
}

}  // namespace dagscore
