#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace dagscore {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted, duplicate-free list of 0-based vertex (or column) indices.
using VertexList = std::vector<int>;

/// log|A| for symmetric positive definite A via Cholesky; nullopt when the
/// factorization fails (the definitive non-s.p.d. signal).
std::optional<double> log_det_spd(const Matrix& a);

/// As log_det_spd but throws NotSpdError naming `what` on failure.
double log_det_spd_or_throw(const Matrix& a, const char* what);

/// (A + A^T) / 2.
Matrix symmetrized(const Matrix& a);

Matrix principal_submatrix(const Matrix& a, std::span<const int> idx);
Matrix select_columns(const Matrix& a, std::span<const int> idx);
Matrix select_rows(const Matrix& a, std::span<const int> idx);

/// Column-ordered Cholesky of a symmetric matrix that records the pivots.
/// A pivot below `rel_tol * max(diag)` marks the column as linearly
/// dependent on its predecessors; such columns are reported in `dependent`
/// and skipped so the remaining pivots stay meaningful.
struct PivotedCholesky {
  Matrix lower;
  std::vector<double> pivots;
  std::vector<int> dependent;
};
PivotedCholesky cholesky_with_pivots(const Matrix& a, double rel_tol);

/// Complement of `subset` in {0..q-1}.
VertexList complement(std::span<const int> subset, int q);

}  // namespace dagscore
