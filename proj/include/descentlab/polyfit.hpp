#pragma once

#include "descentlab/types.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>

namespace descentlab::polyfit {

struct PolyBasisDesign {
  Vector xs;
  std::size_t degree = 0;
  Matrix design;  ///< n x (degree + 1), column k = P_k(x)
};

/// Legendre design matrix via the Bonnet recurrence. Throws InvalidInput if
/// any |x| > 1.
PolyBasisDesign legendre_design(const Vector& xs, std::size_t degree);

/// Affine map of [lo, hi] onto [-1, 1].
Vector rescale_to_unit_interval(const Vector& xs, double lo, double hi);

/// sum_k coeffs_k P_k(x) at each x.
Vector evaluate_legendre(const Vector& coeffs, const Vector& xs);

enum class FitMethod { pseudo_inverse, gradient_descent };

struct PolyFitOptions {
  FitMethod method = FitMethod::pseudo_inverse;
  std::size_t gd_max_iters = 1000000;
  double gd_grad_tol = 1e-13;
};

/// Minimum-norm least-squares coefficients in the Legendre basis. The
/// gradient-descent path starts at zero and throws NumericalFailure if it has
/// not converged within gd_max_iters.
Vector fit_poly_min_norm(const Vector& xs, const Vector& ys, std::size_t degree,
                         const PolyFitOptions& opts = {});

using TruthFn = std::function<double(double)>;
/// Fits on (train_x, train_y) and returns predictions at probe_x.
using Fitter = std::function<Vector(const Vector& train_x, const Vector& train_y,
                                    const Vector& probe_x)>;

struct BiasVarianceOptions {
  std::size_t n = 20;
  double noise = 0.1;
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  Vector probe;  ///< empty: 64 equispaced points on [-1, 1]
};

struct BiasVarianceResult {
  double bias_sq = 0.0;
  double variance = 0.0;
  double noise = 0.0;
  double total = 0.0;
  double total_stderr = 0.0;
  std::size_t trials = 0;
};

/// Training inputs uniform on [-1, 1], targets truth(x) + noise * eps.
/// bias^2 and variance are averaged over the probe grid; total is the squared
/// error against fresh noisy targets at the probes.
BiasVarianceResult bias_variance_decompose(const TruthFn& truth, const Fitter& fitter,
                                           const BiasVarianceOptions& opts);

/// Legendre min-norm fitter of the given degree.
Fitter legendre_fitter(std::size_t degree);

}  // namespace descentlab::polyfit
