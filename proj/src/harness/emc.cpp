#include "descentlab/harness/emc.hpp"

#include "descentlab/linalg.hpp"
#include "descentlab/rff.hpp"

#include <cmath>

namespace descentlab::harness {

EmcScan estimate_emc(const DataSampler& sampler, const TrainingProcedure& procedure, double eps,
                     const std::vector<std::size_t>& n_grid, std::size_t trials,
                     std::uint64_t seed, std::size_t threads) {
  if (trials < 1) {
    throw InvalidInput("estimate_emc: trials must be at least 1");
  }
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw InvalidInput("estimate_emc: sample-size grid must be strictly increasing");
    }
  }
  EmcScan scan;
  for (std::size_t n : n_grid) {
    std::vector<double> errors(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
      Rng rng = make_rng(seed, "emc", n * 1000003ULL + t);
      const Sample s = sampler(n, rng);
      errors[t] = procedure(s.x, s.y, rng);
    });
    double mean = 0.0;
    for (double e : errors) {
      mean += e;
    }
    mean /= static_cast<double>(trials);
    const bool ok = mean <= eps;
    scan.points.push_back({n, mean, ok});
    if (!ok) {
      break;
    }
    scan.emc = n;
  }
  return scan;
}

DataSampler gaussian_sampler(std::size_t d, double noise) {
  return [d, noise](std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Sample s;
    s.x.resize(static_cast<Index>(n), static_cast<Index>(d));
    for (Index i = 0; i < s.x.rows(); ++i) {
      for (Index j = 0; j < s.x.cols(); ++j) {
        s.x(i, j) = normal(rng);
      }
    }
    const Vector w = Vector::Constant(static_cast<Index>(d), 1.0 / std::sqrt(static_cast<double>(d)));
    Vector y = s.x * w;
    for (Index i = 0; i < y.size(); ++i) {
      y(i) += noise * normal(rng);
    }
    s.y = std::move(y);
    return s;
  };
}

TrainingProcedure min_norm_linear_procedure() {
  return [](const Matrix& x, const Matrix& y, Rng&) {
    const Matrix w = linalg::min_norm_solve(x, y);
    return (x * w - y).squaredNorm() / static_cast<double>(x.rows());
  };
}

TrainingProcedure rff_procedure(std::size_t n_features, double length_scale) {
  return [n_features, length_scale](const Matrix& x, const Matrix& y, Rng& rng) {
    const rff::RFFMap map = rff::sample_rff(n_features, static_cast<std::size_t>(x.cols()),
                                            1.0 / length_scale, rng());
    const rff::RFFPredictor fit = rff::fit_rff_min_norm(map, x, y);
    return rff::mean_squared_error(fit.predict(x), y);
  };
}

}  // namespace descentlab::harness
