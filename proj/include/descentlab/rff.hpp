#pragma once

#include "descentlab/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace descentlab::rff {

/// Frozen random Fourier feature map z(x)_i = sqrt(2/N) cos(omega_i^T x + b_i)
/// with omega_i ~ N(0, s^2 I_d) and b_i ~ U[0, 2pi), where s is the
/// frequency scale. Inner products z(x)^T z(y) estimate the Gaussian kernel
/// with length scale 1/s.
class RFFMap {
 public:
  RFFMap(Matrix omega, Vector phases, double frequency_scale);

  [[nodiscard]] const Matrix& omega() const { return omega_; }
  [[nodiscard]] const Vector& phases() const { return phases_; }
  [[nodiscard]] double frequency_scale() const { return frequency_scale_; }
  [[nodiscard]] double kernel_length_scale() const { return 1.0 / frequency_scale_; }
  [[nodiscard]] Index n_features() const { return omega_.rows(); }
  [[nodiscard]] Index dim() const { return omega_.cols(); }

 private:
  Matrix omega_;
  Vector phases_;
  double frequency_scale_;
};

RFFMap sample_rff(std::size_t n_features, std::size_t dim, double frequency_scale,
                  std::uint64_t seed);

Vector featurize(const RFFMap& map, const Vector& x);

/// Feature matrix Z with row i = z(x_i)^T.
Matrix featurize_rows(const RFFMap& map, const Matrix& x);

/// exp(-|x - y|^2 / (2 length_scale^2)).
double gaussian_kernel(const Vector& x, const Vector& y, double length_scale);

Matrix gaussian_kernel_matrix(const Matrix& a, const Matrix& b, double length_scale);

struct KernelApproxError {
  double max_abs_err = 0.0;
  double mean_abs_err = 0.0;
};

/// |z(x)^T z(y) - k(x, y)| over all unordered pairs of distinct rows
/// (k uses the map's length scale).
KernelApproxError kernel_approx_error(const RFFMap& map, const Matrix& points);

struct RFFPredictor {
  RFFMap map;
  Matrix beta;  ///< N x outputs

  [[nodiscard]] Matrix predict(const Matrix& x) const;
};

/// beta = Z^+ Y, columnwise for multi-output targets.
RFFPredictor fit_rff_min_norm(const RFFMap& map, const Matrix& x_train, const Matrix& y_train);
RFFPredictor fit_rff_min_norm(const RFFMap& map, const Matrix& x_train, const Vector& y_train);

/// h(x) = sum_k alpha_k k(x_k, x): the minimum-norm kernel interpolant.
struct KernelInterpolant {
  Matrix centers;
  Matrix alpha;  ///< n x outputs
  double length_scale = 1.0;
  double condition_estimate = 0.0;  ///< sigma_max / sigma_min of K (inf when singular)
  bool ill_conditioned = false;

  [[nodiscard]] Matrix predict(const Matrix& x) const;
};

/// Condition numbers above this set KernelInterpolant::ill_conditioned.
inline constexpr double kIllConditionedThreshold = 1e12;

KernelInterpolant fit_kernel_interpolant(const Matrix& x_train, const Matrix& y_train,
                                         double length_scale);

struct SplitDataset {
  Matrix x_train;
  Matrix y_train;  ///< n_train x outputs
  Matrix x_test;
  Matrix y_test;
  /// Class indices when targets are one-hot; enables zero-one error.
  std::optional<std::vector<int>> train_classes;
  std::optional<std::vector<int>> test_classes;
};

struct SweepRow {
  std::size_t n_features = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  std::optional<double> test_zero_one;
  double beta_norm = 0.0;  ///< median over repeats
  std::size_t repeats = 0;
};

struct SweepOptions {
  std::vector<std::size_t> n_grid;
  double length_scale = 5.0;  ///< kernel length scale; maps use frequency scale 1/length_scale
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Mean squared error with the squared loss summed over output columns.
double mean_squared_error(const Matrix& predicted, const Matrix& target);

/// Model-wise sweep: for each N, fit min-norm RFF predictors on independently
/// sampled maps and average train/test errors.
std::vector<SweepRow> rff_double_descent_sweep(const SplitDataset& data, const SweepOptions& opts);

}  // namespace descentlab::rff
