#include "descentlab/separable.hpp"

#include "descentlab/harness/seeds.hpp"
#include "descentlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace descentlab::separable {
namespace {

// KKT residual of the dual at alpha given w = sum alpha_i y_i x_i.
double kkt_violation(const Matrix& signed_rows, const Vector& alpha, const Vector& w) {
  const Vector slack = Vector::Ones(signed_rows.rows()) - signed_rows * w;
  double worst = 0.0;
  for (Index i = 0; i < slack.size(); ++i) {
    const double v = alpha(i) > 0.0 ? std::abs(slack(i)) : std::max(0.0, slack(i));
    worst = std::max(worst, v);
  }
  return worst;
}

bool witness_separates(const Matrix& points, const Vector& labels, const Vector& w) {
  if (w.size() != points.cols()) {
    return false;
  }
  return (labels.cwiseProduct(points * w)).minCoeff() > 0.0;
}

// Re-solve the equality system y_i x_i^T w = 1 on the detected support set.
// Accepted only when it stays primal feasible with nonnegative multipliers.
bool polish(const Matrix& signed_rows, const std::vector<Index>& support, double tol,
            SVMSolution& sol) {
  if (support.empty()) {
    return false;
  }
  Matrix a(static_cast<Index>(support.size()), signed_rows.cols());
  for (std::size_t k = 0; k < support.size(); ++k) {
    a.row(static_cast<Index>(k)) = signed_rows.row(support[k]);
  }
  const Vector ones = Vector::Ones(a.rows());
  const Vector w = linalg::min_norm_least_squares(a, ones).weights;
  if ((a * w - ones).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  if ((signed_rows * w).minCoeff() < 1.0 - tol) {
    return false;
  }
  const Vector alpha_s = linalg::min_norm_least_squares(a.transpose(), w).weights;
  if (alpha_s.minCoeff() < -tol) {
    return false;
  }
  sol.w = w;
  sol.alpha.setZero();
  for (std::size_t k = 0; k < support.size(); ++k) {
    sol.alpha(support[k]) = std::max(0.0, alpha_s(static_cast<Index>(k)));
  }
  return true;
}

}  // namespace

SeparableDataset generate_separable(std::size_t n, std::size_t d, double margin,
                                    std::uint64_t seed) {
  if (n < 2) {
    throw InvalidInput("generate_separable: need at least two points");
  }
  if (d < 1) {
    throw InvalidInput("generate_separable: dimension must be at least 1");
  }
  if (!(margin > 0.0) || !std::isfinite(margin)) {
    throw InvalidInput("generate_separable: margin must be positive");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  Vector w_star(static_cast<Index>(d));
  do {
    for (Index j = 0; j < w_star.size(); ++j) {
      w_star(j) = normal(rng);
    }
  } while (w_star.norm() == 0.0);
  w_star.normalize();

  SeparableDataset out;
  out.points.resize(static_cast<Index>(n), static_cast<Index>(d));
  out.labels.resize(static_cast<Index>(n));
  for (Index i = 0; i < out.labels.size(); ++i) {
    out.labels(i) = coin(rng) ? 1.0 : -1.0;
  }
  if (out.labels.cwiseEqual(out.labels(0)).all()) {
    out.labels(1) = -out.labels(0);
  }
  for (Index i = 0; i < out.points.rows(); ++i) {
    Vector z(static_cast<Index>(d));
    for (Index j = 0; j < z.size(); ++j) {
      z(j) = normal(rng);
    }
    z -= z.dot(w_star) * w_star;
    const double along = out.labels(i) * (margin + std::abs(normal(rng)));
    out.points.row(i) = (z + along * w_star).transpose();
  }
  out.witness = w_star;
  return out;
}

std::optional<Vector> perceptron(const Matrix& points, const Vector& labels, std::size_t epochs) {
  Vector w = Vector::Zero(points.cols());
  for (std::size_t e = 0; e < epochs; ++e) {
    bool clean = true;
    for (Index i = 0; i < points.rows(); ++i) {
      if (labels(i) * points.row(i).dot(w) <= 0.0) {
        w += labels(i) * points.row(i).transpose();
        clean = false;
      }
    }
    if (clean) {
      return w;
    }
  }
  return std::nullopt;
}

SVMSolution hard_margin_svm(const SeparableDataset& data, const SvmOptions& opts) {
  const Matrix& x = data.points;
  if (x.rows() < 1 || data.labels.size() != x.rows()) {
    throw InvalidInput("hard_margin_svm: label count does not match point count");
  }
  descent::require_pm_one(data.labels);
  if (!x.allFinite()) {
    throw InvalidInput("hard_margin_svm: non-finite points");
  }
  const bool separable =
      perceptron(x, data.labels, opts.perceptron_epochs).has_value() ||
      (data.witness && witness_separates(x, data.labels, *data.witness));
  if (!separable) {
    throw NotSeparableError("hard_margin_svm: data is not linearly separable");
  }

  const Matrix signed_rows = data.labels.asDiagonal() * x;
  const Vector row_sq = signed_rows.rowwise().squaredNorm();
  const Index n = x.rows();
  SVMSolution sol;
  sol.alpha = Vector::Zero(n);
  sol.w = Vector::Zero(x.cols());

  for (sol.passes = 0; sol.passes < opts.max_passes; ++sol.passes) {
    for (Index i = 0; i < n; ++i) {
      const double grad = 1.0 - signed_rows.row(i).dot(sol.w);
      const double updated = std::max(0.0, sol.alpha(i) + grad / row_sq(i));
      const double delta = updated - sol.alpha(i);
      if (delta != 0.0) {
        sol.alpha(i) = updated;
        sol.w += delta * signed_rows.row(i).transpose();
      }
    }
    if (kkt_violation(signed_rows, sol.alpha, sol.w) <= opts.tol) {
      break;
    }
  }
  if (sol.passes == opts.max_passes) {
    throw NumericalFailure("hard_margin_svm: dual coordinate ascent did not converge");
  }

  const double alpha_floor = opts.tol * (1.0 + sol.alpha.maxCoeff());
  for (Index i = 0; i < n; ++i) {
    if (sol.alpha(i) > alpha_floor) {
      sol.support_indices.push_back(i);
    }
  }
  polish(signed_rows, sol.support_indices, 1e-9, sol);
  return sol;
}

double direction_gap(const Vector& w, const Vector& reference) {
  if (w.size() != reference.size()) {
    throw InvalidInput("direction_gap: dimension mismatch");
  }
  const double wn = w.norm();
  const double rn = reference.norm();
  if (wn == 0.0 || rn == 0.0) {
    throw InvalidInput("direction_gap: zero vector has no direction");
  }
  return (w / wn - reference / rn).norm();
}

ImplicitBiasResult implicit_bias_run(const SeparableDataset& data,
                                     const descent::SurrogateLoss& loss,
                                     const descent::GDConfig& cfg, double gap_threshold,
                                     std::optional<Vector> w0) {
  ImplicitBiasResult out;
  out.svm = hard_margin_svm(data);
  const Vector start = w0 ? *w0 : Vector::Zero(data.points.cols());
  out.trajectory = descent::gd_classification(data.points, data.labels, loss, start, cfg);
  for (const descent::GDRecord& rec : out.trajectory.records) {
    if (rec.unit_direction) {
      out.gaps.push_back({rec.t, direction_gap(*rec.unit_direction, out.svm.w)});
    }
  }
  out.direction_converged = !out.gaps.empty() && out.gaps.back().gap < gap_threshold;
  return out;
}

}  // namespace descentlab::separable
