#pragma once

#include "descentlab/harness/seeds.hpp"
#include "descentlab/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace descentlab::harness {

struct Sample {
  Matrix x;
  Matrix y;
};

/// Draws n labelled examples from the data distribution.
using DataSampler = std::function<Sample(std::size_t n, Rng& rng)>;
/// Trains on (x, y) and returns the training error. May draw randomness
/// (e.g. a feature map) from rng.
using TrainingProcedure = std::function<double(const Matrix& x, const Matrix& y, Rng& rng)>;

struct EmcPoint {
  std::size_t n = 0;
  double mean_train_error = 0.0;
  bool within_threshold = false;
};

struct EmcScan {
  std::size_t emc = 0;  ///< 0 when even the smallest n fails
  std::vector<EmcPoint> points;  ///< scanned prefix of the grid
};

/// Effective model complexity: the largest n of an increasing grid whose mean
/// training error over `trials` stays <= eps. The scan stops at the first n
/// that fails.
EmcScan estimate_emc(const DataSampler& sampler, const TrainingProcedure& procedure, double eps,
                     const std::vector<std::size_t>& n_grid, std::size_t trials,
                     std::uint64_t seed, std::size_t threads = 1);

/// x ~ N(0, I_d), y = x^T w + noise * eps with w = 1/sqrt(d) * 1.
DataSampler gaussian_sampler(std::size_t d, double noise);

/// Mean squared training residual of the min-norm least-squares fit.
TrainingProcedure min_norm_linear_procedure();

/// Same for an RFF model with a freshly sampled map per call.
TrainingProcedure rff_procedure(std::size_t n_features, double length_scale);

}  // namespace descentlab::harness
