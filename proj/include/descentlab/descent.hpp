#pragma once

#include "descentlab/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace descentlab::descent {

struct GDConfig {
  double step_size = 0.0;
  std::size_t max_iters = 10000;
  double grad_tol = 1e-10;
  std::size_t record_every = 100;

  /// Throws ConfigError unless step_size > 0, max_iters >= 1, record_every >= 1.
  void validate() const;
};

struct GDRecord {
  std::size_t t = 0;
  double loss = 0.0;
  double weight_norm = 0.0;
  std::optional<Vector> unit_direction;  ///< absent when w_t = 0
  std::optional<double> min_margin;      ///< min_i y_i w_t^T x_i / |w_t|; classification only
};

struct GDTrajectory {
  std::vector<GDRecord> records;
  Vector final_w;
  std::size_t iterations = 0;
  bool converged = false;
};

enum class LossKind { exponential, logistic };

/// Margin-based surrogate for the 0-1 loss, evaluated at u = y w^T x.
class SurrogateLoss {
 public:
  /// Exponential-loss arguments are clamped from below at this value.
  static constexpr double kExpClamp = -50.0;

  explicit SurrogateLoss(LossKind kind) : kind_(kind) {}

  static SurrogateLoss exponential() { return SurrogateLoss(LossKind::exponential); }
  static SurrogateLoss logistic() { return SurrogateLoss(LossKind::logistic); }

  [[nodiscard]] LossKind kind() const { return kind_; }
  [[nodiscard]] double value(double u) const;
  [[nodiscard]] double derivative(double u) const;
  [[nodiscard]] double second_derivative(double u) const;

  /// Global Lipschitz constant of the derivative; nullopt when unbounded
  /// (exponential loss).
  [[nodiscard]] std::optional<double> smoothness() const;

 private:
  LossKind kind_;
};

/// Curvature bound for l on the sublevel set {w : L(w) <= L(w0)}. Equals the
/// global constant when the loss has one; for the exponential loss it is
/// L(w0), since l'' = l there and every term is bounded by the total.
double effective_smoothness(const SurrogateLoss& loss, const Matrix& x, const Vector& labels,
                            const Vector& w0);

/// 2 / (beta * sigma_max(X)^2).
double max_stable_step(const Matrix& x, double beta);

/// Plain gradient descent on 0.5 |Xw - y|^2. Requires step_size < 1/sigma_max(X)^2.
GDTrajectory gd_least_squares(const Matrix& x, const Vector& y, const Vector& w0,
                              const GDConfig& cfg);

/// Gradient descent on sum_i l(y_i w^T x_i). Never reports convergence; runs
/// for cfg.max_iters steps.
GDTrajectory gd_classification(const Matrix& x, const Vector& labels,
                               const SurrogateLoss& loss, const Vector& w0,
                               const GDConfig& cfg);

/// L(w) and grad L(w) for the classification objective.
double classification_loss(const Matrix& x, const Vector& labels, const SurrogateLoss& loss,
                           const Vector& w);
Vector classification_gradient(const Matrix& x, const Vector& labels,
                               const SurrogateLoss& loss, const Vector& w);

/// Throws InvalidInput unless every label is exactly +1 or -1.
void require_pm_one(const Vector& labels);

}  // namespace descentlab::descent
