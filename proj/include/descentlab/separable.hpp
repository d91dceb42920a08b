#pragma once

#include "descentlab/descent.hpp"
#include "descentlab/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace descentlab::separable {

struct SeparableDataset {
  Matrix points;  ///< n x d
  Vector labels;  ///< +1 / -1
  std::optional<Vector> witness;  ///< some w with y_i w^T x_i > 0 for all i
};

/// Random unit direction w*, Gaussian points with their w* component replaced
/// by y_i (margin + |e_i|), e_i ~ N(0, 1). Both classes always occur.
SeparableDataset generate_separable(std::size_t n, std::size_t d, double margin,
                                    std::uint64_t seed);

struct SVMSolution {
  Vector w;
  std::vector<Index> support_indices;
  Vector alpha;  ///< dual variables, w = sum_i alpha_i y_i x_i
  std::size_t passes = 0;
};

struct SvmOptions {
  double tol = 1e-8;
  std::size_t max_passes = 1000000;
  std::size_t perceptron_epochs = 1000;
};

/// Hard-margin SVM without intercept: min |w|^2 s.t. y_i w^T x_i >= 1.
/// Solved by dual coordinate ascent, then polished on the detected support
/// set. Throws NotSeparableError when the constraints are infeasible.
SVMSolution hard_margin_svm(const SeparableDataset& data, const SvmOptions& opts = {});

/// Perceptron (no intercept) for a bounded number of epochs; returns a
/// separating direction if it finds one.
std::optional<Vector> perceptron(const Matrix& points, const Vector& labels, std::size_t epochs);

/// | w/|w| - r/|r| |, in [0, 2].
double direction_gap(const Vector& w, const Vector& reference);

struct GapPoint {
  std::size_t t = 0;
  double gap = 0.0;
};

struct ImplicitBiasResult {
  descent::GDTrajectory trajectory;
  SVMSolution svm;
  std::vector<GapPoint> gaps;  ///< one per recorded step with w_t != 0
  bool direction_converged = false;
};

ImplicitBiasResult implicit_bias_run(const SeparableDataset& data,
                                     const descent::SurrogateLoss& loss,
                                     const descent::GDConfig& cfg,
                                     double gap_threshold = 0.05,
                                     std::optional<Vector> w0 = std::nullopt);

}  // namespace descentlab::separable
