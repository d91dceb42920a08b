#include "descentlab/polyfit.hpp"

#include "descentlab/descent.hpp"
#include "descentlab/harness/seeds.hpp"
#include "descentlab/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace descentlab::polyfit {

PolyBasisDesign legendre_design(const Vector& xs, std::size_t degree) {
  for (Index i = 0; i < xs.size(); ++i) {
    if (!(std::abs(xs(i)) <= 1.0)) {
      throw InvalidInput("legendre_design: x = " + std::to_string(xs(i)) + " outside [-1, 1]");
    }
  }
  PolyBasisDesign out;
  out.xs = xs;
  out.degree = degree;
  out.design.resize(xs.size(), static_cast<Index>(degree) + 1);
  out.design.col(0).setOnes();
  if (degree >= 1) {
    out.design.col(1) = xs;
  }
  for (std::size_t k = 1; k < degree; ++k) {
    const double kk = static_cast<double>(k);
    const auto c = static_cast<Index>(k);
    out.design.col(c + 1) = ((2.0 * kk + 1.0) * xs.cwiseProduct(out.design.col(c)) -
                             kk * out.design.col(c - 1)) /
                            (kk + 1.0);
  }
  return out;
}

Vector rescale_to_unit_interval(const Vector& xs, double lo, double hi) {
  if (!(hi > lo)) {
    throw InvalidInput("rescale_to_unit_interval: need hi > lo");
  }
  Vector out = ((xs.array() - lo) * (2.0 / (hi - lo)) - 1.0).matrix();
  // Endpoints can land a rounding error outside [-1, 1].
  return out.cwiseMax(-1.0).cwiseMin(1.0);
}

Vector evaluate_legendre(const Vector& coeffs, const Vector& xs) {
  if (coeffs.size() == 0) {
    return Vector::Zero(xs.size());
  }
  return legendre_design(xs, static_cast<std::size_t>(coeffs.size() - 1)).design * coeffs;
}

Vector fit_poly_min_norm(const Vector& xs, const Vector& ys, std::size_t degree,
                         const PolyFitOptions& opts) {
  if (xs.size() != ys.size()) {
    throw InvalidInput("fit_poly_min_norm: xs and ys lengths differ");
  }
  const Matrix design = legendre_design(xs, degree).design;
  if (opts.method == FitMethod::pseudo_inverse) {
    return linalg::min_norm_least_squares(design, ys).weights;
  }
  const double smax = linalg::max_singular_value(design);
  descent::GDConfig cfg;
  cfg.step_size = smax > 0.0 ? 0.9 / (smax * smax) : 1.0;
  cfg.max_iters = opts.gd_max_iters;
  cfg.grad_tol = opts.gd_grad_tol;
  cfg.record_every = opts.gd_max_iters;
  descent::GDTrajectory traj =
      descent::gd_least_squares(design, ys, Vector::Zero(design.cols()), cfg);
  if (!traj.converged) {
    throw NumericalFailure("fit_poly_min_norm: gradient descent did not converge in " +
                           std::to_string(opts.gd_max_iters) + " iterations");
  }
  return std::move(traj.final_w);
}

Fitter legendre_fitter(std::size_t degree) {
  return [degree](const Vector& train_x, const Vector& train_y, const Vector& probe_x) {
    return evaluate_legendre(fit_poly_min_norm(train_x, train_y, degree), probe_x);
  };
}

BiasVarianceResult bias_variance_decompose(const TruthFn& truth, const Fitter& fitter,
                                           const BiasVarianceOptions& opts) {
  if (opts.trials < 2) {
    throw InvalidInput("bias_variance_decompose: need at least two trials");
  }
  if (opts.n < 1) {
    throw InvalidInput("bias_variance_decompose: need at least one training point");
  }
  const Vector probe = opts.probe.size() > 0 ? opts.probe : Vector::LinSpaced(64, -1.0, 1.0);
  const Index g = probe.size();
  Vector truth_at_probe(g);
  for (Index j = 0; j < g; ++j) {
    truth_at_probe(j) = truth(probe(j));
  }

  Matrix predictions(g, static_cast<Index>(opts.trials));
  std::vector<double> trial_total(opts.trials);
  parallel_for(opts.trials, opts.threads, [&](std::size_t t) {
    Rng rng = make_rng(opts.seed, "bias-variance", t);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector xs(static_cast<Index>(opts.n));
    Vector ys(xs.size());
    for (Index i = 0; i < xs.size(); ++i) {
      xs(i) = unif(rng);
      ys(i) = truth(xs(i)) + opts.noise * normal(rng);
    }
    const Vector pred = fitter(xs, ys, probe);
    if (pred.size() != g) {
      throw InvalidInput("bias_variance_decompose: fitter returned wrong prediction count");
    }
    predictions.col(static_cast<Index>(t)) = pred;
    double sq = 0.0;
    for (Index j = 0; j < g; ++j) {
      const double fresh = truth_at_probe(j) + opts.noise * normal(rng);
      sq += (fresh - pred(j)) * (fresh - pred(j));
    }
    trial_total[t] = sq / static_cast<double>(g);
  });

  const auto trials = static_cast<double>(opts.trials);
  const Vector mean_pred = predictions.rowwise().mean();
  BiasVarianceResult out;
  out.trials = opts.trials;
  out.bias_sq = (truth_at_probe - mean_pred).squaredNorm() / static_cast<double>(g);
  out.variance = (predictions.colwise() - mean_pred).squaredNorm() / (static_cast<double>(g) * trials);
  out.noise = opts.noise * opts.noise;
  double sum = 0.0;
  for (double v : trial_total) {
    sum += v;
  }
  out.total = sum / trials;
  double ss = 0.0;
  for (double v : trial_total) {
    ss += (v - out.total) * (v - out.total);
  }
  out.total_stderr = std::sqrt(ss / (trials - 1.0) / trials);
  return out;
}

}  // namespace descentlab::polyfit
