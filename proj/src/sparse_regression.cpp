#include "descentlab/sparse_regression.hpp"

#include "descentlab/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace descentlab::sparse {
namespace {

Matrix select_columns(const Matrix& x, const std::vector<Index>& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    out.col(static_cast<Index>(j)) = x.col(cols[j]);
  }
  return out;
}

double squared_norm_over(const Vector& w, const std::vector<Index>& idx) {
  double s = 0.0;
  for (Index i : idx) {
    s += w(i) * w(i);
  }
  return s;
}

void fill_normal(Matrix& m, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  // Row by row so the draw order matches the "one sample per row" reading.
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = normal(rng);
    }
  }
}

double test_risk(const GaussianLinearProblem& problem, const Vector& w_hat,
                 std::size_t test_points, Rng& rng) {
  Matrix t(static_cast<Index>(test_points), problem.w_true.size());
  fill_normal(t, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vector gap = problem.w_true - w_hat;
  double total = 0.0;
  for (Index i = 0; i < t.rows(); ++i) {
    const double err = t.row(i).dot(gap) + problem.noise_scale * normal(rng);
    total += err * err;
  }
  return total / static_cast<double>(test_points);
}

void require_options(const MonteCarloOptions& opts) {
  if (opts.trials < 1) {
    throw InvalidInput("monte carlo: trials must be at least 1");
  }
  if (opts.test_points < 1) {
    throw InvalidInput("monte carlo: test_points must be at least 1");
  }
}

}  // namespace

void GaussianLinearProblem::validate() const {
  if (w_true.size() < 1) {
    throw InvalidInput("problem: d must be at least 1");
  }
  if (n < 1) {
    throw InvalidInput("problem: n must be at least 1");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw InvalidInput("problem: noise scale must be finite and nonnegative");
  }
  if (!w_true.allFinite()) {
    throw InvalidInput("problem: w_true has non-finite entries");
  }
}

SubsetSelection SubsetSelection::from_kept(std::size_t d, std::vector<Index> kept) {
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw InvalidInput("subset: duplicate column index");
  }
  if (!kept.empty() && (kept.front() < 0 || static_cast<std::size_t>(kept.back()) >= d)) {
    throw InvalidInput("subset: column index out of range");
  }
  SubsetSelection sel;
  sel.discarded.reserve(d - kept.size());
  std::size_t k = 0;
  for (Index i = 0; i < static_cast<Index>(d); ++i) {
    if (k < kept.size() && kept[k] == i) {
      ++k;
    } else {
      sel.discarded.push_back(i);
    }
  }
  sel.kept = std::move(kept);
  return sel;
}

SubsetSelection SubsetSelection::random(std::size_t d, std::size_t p, Rng& rng) {
  if (p > d) {
    throw InvalidInput("subset: p exceeds d");
  }
  std::vector<Index> idx(d);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (std::size_t i = 0; i < p; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, d - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(p);
  return from_kept(d, std::move(idx));
}

double RiskValue::value() const {
  if (infinite_) {
    throw std::logic_error("RiskValue: value() on infinite risk");
  }
  return value_;
}

std::string RiskValue::to_string() const {
  if (infinite_) {
    return "inf";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value_);
  return std::string(buf, res.ptr);
}

Dataset sample_dataset(const GaussianLinearProblem& problem, std::uint64_t seed) {
  Rng rng(seed);
  return sample_dataset(problem, rng);
}

Dataset sample_dataset(const GaussianLinearProblem& problem, Rng& rng) {
  problem.validate();
  Dataset out;
  out.x.resize(static_cast<Index>(problem.n), problem.w_true.size());
  fill_normal(out.x, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.y = out.x * problem.w_true;
  for (Index i = 0; i < out.y.size(); ++i) {
    out.y(i) += problem.noise_scale * normal(rng);
  }
  return out;
}

LinearPredictor fit_subset_min_norm(const Matrix& x, const Vector& y, const SubsetSelection& sel) {
  if (sel.d() != static_cast<std::size_t>(x.cols())) {
    throw InvalidInput("fit_subset_min_norm: subset size does not match column count");
  }
  if (y.size() != x.rows()) {
    throw InvalidInput("fit_subset_min_norm: target length does not match row count");
  }
  LinearPredictor out;
  out.weights = Vector::Zero(x.cols());
  out.active = sel.kept;
  if (sel.kept.empty()) {
    return out;
  }
  const Vector w_p = linalg::min_norm_least_squares(select_columns(x, sel.kept), y).weights;
  for (std::size_t j = 0; j < sel.kept.size(); ++j) {
    out.weights(sel.kept[j]) = w_p(static_cast<Index>(j));
  }
  return out;
}

RiskValue analytic_risk_fixed_subset(const Vector& w_true, const SubsetSelection& sel,
                                     double noise_scale, std::size_t n) {
  if (sel.d() != static_cast<std::size_t>(w_true.size())) {
    throw InvalidInput("analytic_risk_fixed_subset: subset size does not match w_true");
  }
  const double p = static_cast<double>(sel.p());
  const double nn = static_cast<double>(n);
  const double kept_sq = squared_norm_over(w_true, sel.kept);
  const double rest = squared_norm_over(w_true, sel.discarded) + noise_scale * noise_scale;
  if (sel.p() == 0) {
    return RiskValue::finite(rest);
  }
  if (sel.p() + 2 <= n) {
    return RiskValue::finite(rest * (1.0 + p / (nn - p - 1.0)));
  }
  if (sel.p() >= n + 2) {
    return RiskValue::finite(kept_sq * (1.0 - nn / p) + rest * (1.0 + nn / (p - nn - 1.0)));
  }
  return RiskValue::infinity();
}

RiskValue analytic_risk_random_subset(double w_norm_sq, double noise_var, std::size_t d,
                                      std::size_t n, std::size_t p) {
  if (p > d) {
    throw InvalidInput("analytic_risk_random_subset: p exceeds d");
  }
  const double pp = static_cast<double>(p);
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  if (p == 0) {
    return RiskValue::finite(w_norm_sq + noise_var);
  }
  if (p + 2 <= n) {
    return RiskValue::finite(((1.0 - pp / dd) * w_norm_sq + noise_var) *
                             (1.0 + pp / (nn - pp - 1.0)));
  }
  if (p >= n + 2) {
    const double excess = pp - nn - 1.0;
    return RiskValue::finite(w_norm_sq * (1.0 - (nn / dd) * (2.0 - (dd - nn - 1.0) / excess)) +
                             noise_var * (1.0 + nn / excess));
  }
  return RiskValue::infinity();
}

MonteCarloEstimate summarize(std::vector<double> values) {
  MonteCarloEstimate out;
  out.trials = values.size();
  if (values.empty()) {
    return out;
  }
  const double count = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - out.mean) * (v - out.mean);
    }
    out.std_error = std::sqrt(ss / (count - 1.0) / count);
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  out.median = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    out.median = 0.5 * (out.median + lower);
  }
  return out;
}

MonteCarloEstimate monte_carlo_risk(const GaussianLinearProblem& problem, std::size_t p,
                                    const MonteCarloOptions& opts) {
  problem.validate();
  require_options(opts);
  if (p > problem.d()) {
    throw InvalidInput("monte_carlo_risk: p exceeds d");
  }
  std::vector<double> per_trial(opts.trials);
  parallel_for(opts.trials, opts.threads, [&](std::size_t t) {
    Rng rng = make_rng(opts.seed, "mc-risk", t);
    const SubsetSelection sel = SubsetSelection::random(problem.d(), p, rng);
    const Dataset train = sample_dataset(problem, rng);
    const LinearPredictor fit = fit_subset_min_norm(train.x, train.y, sel);
    per_trial[t] = test_risk(problem, fit.weights, opts.test_points, rng);
  });
  return summarize(std::move(per_trial));
}

MonteCarloEstimate monte_carlo_risk_fixed_subset(const GaussianLinearProblem& problem,
                                                 const SubsetSelection& sel,
                                                 const MonteCarloOptions& opts) {
  problem.validate();
  require_options(opts);
  std::vector<double> per_trial(opts.trials);
  parallel_for(opts.trials, opts.threads, [&](std::size_t t) {
    Rng rng = make_rng(opts.seed, "mc-risk-fixed", t);
    const Dataset train = sample_dataset(problem, rng);
    const LinearPredictor fit = fit_subset_min_norm(train.x, train.y, sel);
    per_trial[t] = test_risk(problem, fit.weights, opts.test_points, rng);
  });
  return summarize(std::move(per_trial));
}

MonteCarloEstimate projection_norm_estimate(const GaussianLinearProblem& problem,
                                            const SubsetSelection& sel,
                                            const MonteCarloOptions& opts) {
  problem.validate();
  require_options(opts);
  Vector w_p(static_cast<Index>(sel.p()));
  for (std::size_t j = 0; j < sel.p(); ++j) {
    w_p(static_cast<Index>(j)) = problem.w_true(sel.kept[j]);
  }
  std::vector<double> per_trial(opts.trials);
  parallel_for(opts.trials, opts.threads, [&](std::size_t t) {
    Rng rng = make_rng(opts.seed, "projection", t);
    Matrix x_p(static_cast<Index>(problem.n), static_cast<Index>(sel.p()));
    fill_normal(x_p, rng);
    // X^+ X is the orthogonal projector onto the row space of X.
    const linalg::SvdResult dec = linalg::svd(x_p);
    per_trial[t] = (dec.vt * w_p).squaredNorm();
  });
  return summarize(std::move(per_trial));
}

std::vector<RiskCurveRow> risk_curve(const GaussianLinearProblem& problem,
                                     const std::vector<std::size_t>& p_grid,
                                     const MonteCarloOptions& opts) {
  problem.validate();
  const double w_norm_sq = problem.w_true.squaredNorm();
  const double noise_var = problem.noise_scale * problem.noise_scale;
  std::vector<RiskCurveRow> rows;
  rows.reserve(p_grid.size());
  for (std::size_t p : p_grid) {
    if (p > problem.d()) {
      throw InvalidInput("risk_curve: grid value " + std::to_string(p) + " exceeds d");
    }
    MonteCarloOptions per_p = opts;
    per_p.seed = derive_seed(opts.seed, "risk-curve", p);
    const MonteCarloEstimate mc = monte_carlo_risk(problem, p, per_p);
    RiskCurveRow row;
    row.p = p;
    row.analytic_risk = analytic_risk_random_subset(w_norm_sq, noise_var, problem.d(), problem.n, p);
    row.mc_risk = mc.mean;
    row.mc_stderr = mc.std_error;
    row.mc_median = mc.median;
    row.trials = mc.trials;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace descentlab::sparse
