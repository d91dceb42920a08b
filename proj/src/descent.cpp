#include "descentlab/descent.hpp"

#include "descentlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace descentlab::descent {
namespace {

// Runs abort when the loss exceeds this multiple of its initial value.
constexpr double kDivergenceFactor = 10.0;

void require_w0(const Matrix& x, const Vector& w0, const char* what) {
  if (w0.size() != x.cols()) {
    throw InvalidInput(std::string(what) + ": w0 length " + std::to_string(w0.size()) +
                       " does not match column count " + std::to_string(x.cols()));
  }
}

bool diverged(double loss, double initial) {
  return !std::isfinite(loss) || loss > kDivergenceFactor * initial + 1e-300;
}

GDRecord make_record(std::size_t t, double loss, const Vector& w) {
  GDRecord rec;
  rec.t = t;
  rec.loss = loss;
  rec.weight_norm = w.norm();
  if (rec.weight_norm > 0.0) {
    rec.unit_direction = w / rec.weight_norm;
  }
  return rec;
}

}  // namespace

void GDConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("step size must be positive and finite");
  }
  if (max_iters < 1) {
    throw ConfigError("max_iters must be at least 1");
  }
  if (record_every < 1) {
    throw ConfigError("record_every must be at least 1");
  }
  if (!(grad_tol >= 0.0)) {
    throw ConfigError("grad_tol must be nonnegative");
  }
}

double SurrogateLoss::value(double u) const {
  switch (kind_) {
    case LossKind::exponential:
      return std::exp(-std::max(u, kExpClamp));
    case LossKind::logistic:
      return u > -30.0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
  }
  return 0.0;
}

double SurrogateLoss::derivative(double u) const {
  switch (kind_) {
    case LossKind::exponential:
      return -std::exp(-std::max(u, kExpClamp));
    case LossKind::logistic:
      return u >= 0.0 ? -std::exp(-u) / (1.0 + std::exp(-u)) : -1.0 / (1.0 + std::exp(u));
  }
  return 0.0;
}

double SurrogateLoss::second_derivative(double u) const {
  switch (kind_) {
    case LossKind::exponential:
      return std::exp(-std::max(u, kExpClamp));
    case LossKind::logistic: {
      const double e = std::exp(-std::abs(u));
      return e / ((1.0 + e) * (1.0 + e));
    }
  }
  return 0.0;
}

std::optional<double> SurrogateLoss::smoothness() const {
  if (kind_ == LossKind::logistic) {
    return 0.25;
  }
  return std::nullopt;
}

void require_pm_one(const Vector& labels) {
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels(i) != 1.0 && labels(i) != -1.0) {
      throw InvalidInput("labels must be +1 or -1 (index " + std::to_string(i) + ")");
    }
  }
}

double classification_loss(const Matrix& x, const Vector& labels, const SurrogateLoss& loss,
                           const Vector& w) {
  const Vector margins = labels.cwiseProduct(x * w);
  double total = 0.0;
  for (Index i = 0; i < margins.size(); ++i) {
    total += loss.value(margins(i));
  }
  return total;
}

Vector classification_gradient(const Matrix& x, const Vector& labels,
                               const SurrogateLoss& loss, const Vector& w) {
  const Vector margins = labels.cwiseProduct(x * w);
  Vector coeff(margins.size());
  for (Index i = 0; i < margins.size(); ++i) {
    coeff(i) = loss.derivative(margins(i)) * labels(i);
  }
  return x.transpose() * coeff;
}

double effective_smoothness(const SurrogateLoss& loss, const Matrix& x, const Vector& labels,
                            const Vector& w0) {
  if (auto beta = loss.smoothness()) {
    return *beta;
  }
  return classification_loss(x, labels, loss, w0);
}

double max_stable_step(const Matrix& x, double beta) {
  if (!(beta > 0.0)) {
    throw InvalidInput("max_stable_step: smoothness must be positive");
  }
  const double smax = linalg::max_singular_value(x);
  if (smax == 0.0) {
    throw InvalidInput("max_stable_step: zero matrix has no finite step bound");
  }
  return 2.0 / (beta * smax * smax);
}

GDTrajectory gd_least_squares(const Matrix& x, const Vector& y, const Vector& w0,
                              const GDConfig& cfg) {
  cfg.validate();
  require_w0(x, w0, "gd_least_squares");
  if (y.size() != x.rows()) {
    throw InvalidInput("gd_least_squares: target length does not match row count");
  }
  const double smax = linalg::max_singular_value(x);
  if (smax > 0.0 && cfg.step_size >= 1.0 / (smax * smax)) {
    throw ConfigError("gd_least_squares: step size " + std::to_string(cfg.step_size) +
                      " violates eta < 1/sigma_max^2 = " + std::to_string(1.0 / (smax * smax)));
  }

  const double stop = cfg.grad_tol * (1.0 + (x.transpose() * y).norm());
  GDTrajectory traj;
  Vector w = w0;
  double initial = 0.0;
  std::size_t t = 0;
  for (;; ++t) {
    const Vector residual = x * w - y;
    const double loss = 0.5 * residual.squaredNorm();
    if (t == 0) {
      initial = loss;
    } else if (diverged(loss, initial)) {
      throw DivergenceError("gd_least_squares: loss grew from " + std::to_string(initial) +
                            " to " + std::to_string(loss));
    }
    const Vector grad = x.transpose() * residual;
    const bool done = grad.norm() <= stop;
    if (t % cfg.record_every == 0 || done || t == cfg.max_iters) {
      traj.records.push_back(make_record(t, loss, w));
    }
    if (done) {
      traj.converged = true;
      break;
    }
    if (t == cfg.max_iters) {
      break;
    }
    w.noalias() -= cfg.step_size * grad;
  }
  traj.iterations = t;
  traj.final_w = std::move(w);
  return traj;
}

GDTrajectory gd_classification(const Matrix& x, const Vector& labels,
                               const SurrogateLoss& loss, const Vector& w0,
                               const GDConfig& cfg) {
  cfg.validate();
  require_w0(x, w0, "gd_classification");
  if (labels.size() != x.rows()) {
    throw InvalidInput("gd_classification: label count does not match row count");
  }
  require_pm_one(labels);
  const double beta = effective_smoothness(loss, x, labels, w0);
  if (beta > 0.0 && cfg.step_size >= max_stable_step(x, beta)) {
    throw ConfigError("gd_classification: step size exceeds 2/(beta sigma_max^2)");
  }

  // Rows pre-multiplied by their label, so margins are signed * w.
  const Matrix signed_rows = labels.asDiagonal() * x;
  GDTrajectory traj;
  Vector w = w0;
  Vector margins(x.rows());
  Vector coeff(x.rows());
  double initial = 0.0;
  for (std::size_t t = 0;; ++t) {
    margins.noalias() = signed_rows * w;
    double total = 0.0;
    for (Index i = 0; i < margins.size(); ++i) {
      total += loss.value(margins(i));
      coeff(i) = loss.derivative(margins(i));
    }
    if (t == 0) {
      initial = total;
    } else if (diverged(total, initial)) {
      throw DivergenceError("gd_classification: loss grew from " + std::to_string(initial) +
                            " to " + std::to_string(total));
    }
    if (t % cfg.record_every == 0 || t == cfg.max_iters) {
      GDRecord rec = make_record(t, total, w);
      if (rec.weight_norm > 0.0) {
        rec.min_margin = margins.minCoeff() / rec.weight_norm;
      }
      traj.records.push_back(std::move(rec));
    }
    if (t == cfg.max_iters) {
      break;
    }
    w.noalias() -= cfg.step_size * (signed_rows.transpose() * coeff);
  }
  traj.iterations = cfg.max_iters;
  traj.final_w = std::move(w);
  return traj;
}

}  // namespace descentlab::descent
