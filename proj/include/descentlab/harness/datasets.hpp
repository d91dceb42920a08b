#pragma once

#include "descentlab/harness/seeds.hpp"
#include "descentlab/rff.hpp"
#include "descentlab/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace descentlab::harness {

/// Environment variable naming the directory that holds the MNIST IDX files.
inline constexpr const char* kDataDirEnv = "DESCENTLAB_DATA";

struct LabeledDataset {
  Matrix features;  ///< n x d
  Matrix targets;   ///< n x outputs (one-hot for classification)
  std::optional<std::vector<int>> classes;
  std::vector<Index> train;
  std::vector<Index> test;
  std::string feature_scaling;

  /// Throws InvalidInput unless train/test are disjoint and cover all rows.
  void validate() const;
  [[nodiscard]] rff::SplitDataset split() const;
};

enum class SyntheticKind { gaussian_linear, rkhs_target };

struct SyntheticParams {
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  std::size_t dim = 10;
  // gaussian-linear
  double w_norm_sq = 1.0;
  // rkhs-target
  std::size_t centers = 20;
  double length_scale = 1.0;
  // both
  double noise = 0.0;
};

/// y = sum_k alpha_k exp(-|x - c_k|^2 / (2 l^2)): a member of the Gaussian RKHS.
struct RkhsTarget {
  Matrix centers;  ///< k x d
  Vector alphas;
  double length_scale = 1.0;

  [[nodiscard]] Vector operator()(const Matrix& x) const;
};

/// gaussian-linear: delegates to the sparse-regression sampler with
/// w = sqrt(w_norm_sq / d) * 1. rkhs-target: inputs uniform on [0,1]^d,
/// centers uniform on [0,1]^d, alphas uniform in {-1, +1}. The first n_train
/// rows form the training split.
LabeledDataset make_synthetic_regression(SyntheticKind kind, const SyntheticParams& params,
                                         std::uint64_t seed);

/// `total` indices with class counts as equal as possible (lower
/// class labels get the remainder), each class sampled without replacement.
std::vector<Index> stratified_subsample(const std::vector<int>& labels, std::size_t total,
                                        int num_classes, Rng& rng);

/// MNIST train/test files from `dir`, stratified subsamples of the requested
/// sizes, pixels divided by 255, one-hot targets.
LabeledDataset load_mnist_subset(const std::filesystem::path& dir, std::size_t n_train,
                                 std::size_t n_test, std::uint64_t seed);

/// Directory from DESCENTLAB_DATA when it contains all four MNIST files.
std::optional<std::filesystem::path> find_mnist_dir();

}  // namespace descentlab::harness
