#pragma once

#include "descentlab/harness/seeds.hpp"
#include "descentlab/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace descentlab::sparse {

/// y = x^T w_true + noise_scale * eps with x ~ N(0, I_d), eps ~ N(0, 1).
struct GaussianLinearProblem {
  Vector w_true;
  double noise_scale = 0.0;
  std::size_t n = 1;

  [[nodiscard]] std::size_t d() const { return static_cast<std::size_t>(w_true.size()); }
  void validate() const;
};

struct SubsetSelection {
  std::vector<Index> kept;       ///< sorted
  std::vector<Index> discarded;  ///< sorted complement of kept in [0, d)

  [[nodiscard]] std::size_t p() const { return kept.size(); }
  [[nodiscard]] std::size_t d() const { return kept.size() + discarded.size(); }

  /// Throws InvalidInput on duplicates or out-of-range indices.
  static SubsetSelection from_kept(std::size_t d, std::vector<Index> kept);
  /// Uniform over size-p subsets: Fisher-Yates over [0, d), first p taken.
  static SubsetSelection random(std::size_t d, std::size_t p, Rng& rng);
};

/// Real number or +infinity. The infinite case is a distinct state, not a
/// floating-point sentinel; to_string() renders it as "inf".
class RiskValue {
 public:
  static RiskValue finite(double v) { return RiskValue(false, v); }
  static RiskValue infinity() { return RiskValue(true, 0.0); }

  [[nodiscard]] bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error when infinite.
  [[nodiscard]] double value() const;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const RiskValue&, const RiskValue&) = default;

 private:
  RiskValue(bool inf, double v) : infinite_(inf), value_(v) {}
  bool infinite_;
  double value_;
};

struct Dataset {
  Matrix x;
  Vector y;
};

Dataset sample_dataset(const GaussianLinearProblem& problem, std::uint64_t seed);
Dataset sample_dataset(const GaussianLinearProblem& problem, Rng& rng);

/// Min-norm fit on the kept columns; discarded coordinates are zero.
LinearPredictor fit_subset_min_norm(const Matrix& x, const Vector& y, const SubsetSelection& sel);

/// Expected test risk of fit_subset_min_norm for one fixed subset.
RiskValue analytic_risk_fixed_subset(const Vector& w_true, const SubsetSelection& sel,
                                     double noise_scale, std::size_t n);

/// Same risk averaged over a uniformly random size-p subset; depends on w only
/// through |w|^2.
RiskValue analytic_risk_random_subset(double w_norm_sq, double noise_var, std::size_t d,
                                      std::size_t n, std::size_t p);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
  std::size_t trials = 0;
};

struct MonteCarloOptions {
  std::size_t trials = 1000;
  std::size_t test_points = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Each trial draws a fresh subset and training set, fits, and averages the
/// squared error over fresh test draws.
MonteCarloEstimate monte_carlo_risk(const GaussianLinearProblem& problem, std::size_t p,
                                    const MonteCarloOptions& opts);

/// As monte_carlo_risk but with the subset frozen across trials.
MonteCarloEstimate monte_carlo_risk_fixed_subset(const GaussianLinearProblem& problem,
                                                 const SubsetSelection& sel,
                                                 const MonteCarloOptions& opts);

/// Monte Carlo estimate of E|X_p^+ X_p w_p|^2 for the frozen subset.
MonteCarloEstimate projection_norm_estimate(const GaussianLinearProblem& problem,
                                            const SubsetSelection& sel,
                                            const MonteCarloOptions& opts);

struct RiskCurveRow {
  std::size_t p = 0;
  RiskValue analytic_risk = RiskValue::finite(0.0);
  double mc_risk = 0.0;
  double mc_stderr = 0.0;
  double mc_median = 0.0;
  std::size_t trials = 0;
};

/// One row per p; trials for each p use seeds derived from (opts.seed, p).
std::vector<RiskCurveRow> risk_curve(const GaussianLinearProblem& problem,
                                     const std::vector<std::size_t>& p_grid,
                                     const MonteCarloOptions& opts);

/// Summary statistics of per-trial values (mean, standard error, median).
MonteCarloEstimate summarize(std::vector<double> values);

}  // namespace descentlab::sparse
