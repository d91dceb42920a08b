#pragma once

#include "descentlab/types.hpp"

namespace descentlab::linalg {

/// Relative cutoff used for numerical rank: a singular value s is kept when
/// s > kRankEpsilon * max(rows, cols) * s_max.
inline constexpr double kRankEpsilon = 1e-12;

/// Thin, rank-truncated SVD: a = u * diag(singular_values) * vt.
struct SvdResult {
  Matrix u;                ///< rows x rank, orthonormal columns
  Vector singular_values;  ///< rank, strictly positive, nonincreasing
  Matrix vt;               ///< rank x cols, orthonormal rows
  Index rank = 0;
  double max_singular_value = 0.0;  ///< before truncation; 0 for a zero matrix
};

SvdResult svd(const Matrix& a);

Matrix pseudo_inverse(const Matrix& a);

/// w = X^+ y. All coordinates are active.
LinearPredictor min_norm_least_squares(const Matrix& x, const Vector& y);

/// Columnwise X^+ Y for multi-output targets.
Matrix min_norm_solve(const Matrix& x, const Matrix& y);

/// X^+ y + (I - X^+ X) u: a member of the least-squares solution set.
Vector least_squares_solution_member(const Matrix& x, const Vector& y, const Vector& u);

/// Orthogonal projector I - X^+ X onto Ker(X).
Matrix kernel_projector(const Matrix& x);

double max_singular_value(const Matrix& a);

}  // namespace descentlab::linalg
