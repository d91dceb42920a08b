// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Criteria that carry a runtime budget fail when they exceed it.

#include "descentlab/descent.hpp"
#include "descentlab/harness/config.hpp"
#include "descentlab/harness/csv.hpp"
#include "descentlab/harness/emc.hpp"
#include "descentlab/harness/experiments.hpp"
#include "descentlab/harness/seeds.hpp"
#include "descentlab/linalg.hpp"
#include "descentlab/rff.hpp"
#include "descentlab/separable.hpp"
#include "descentlab/sparse_regression.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace descentlab;
namespace h = descentlab::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Row = std::map<std::string, std::string>;

std::vector<Row> parse_csv(const std::string& text) {
  std::istringstream in(h::csv_body(text));
  std::string line;
  std::getline(in, line);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  const auto header = split(line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) r[header[i]] = cells[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

double num(const Row& r, const std::string& key) { return std::stod(r.at(key)); }

const Row* find_row(const std::vector<Row>& rows, const std::string& key, std::size_t value) {
  for (const auto& r : rows) {
    if (r.at(key) == std::to_string(value)) return &r;
  }
  return nullptr;
}

std::string trim_separator(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
  return s;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

// Experiment configurations shared by the experiment criteria and the
// determinism check.
const std::vector<std::map<std::string, std::string>>& experiment_configs() {
  static const std::vector<std::map<std::string, std::string>> cfgs = {
      {{"experiment", "sparse-risk"}, {"seed", "1"}, {"d", "100"}, {"n", "40"},
       {"w_norm_sq", "1"}, {"noise_var", "0.04"},
       {"p_grid", "0,10,20,30,35,38,39,40,41,42,45,50,60,70,80,90,100"}, {"trials", "2000"},
       {"test_points", "100"}},
      {{"experiment", "rff-sweep"}, {"seed", "1"}, {"data", "auto"}, {"n_train", "1000"},
       {"n_test", "1000"}, {"n_grid", "20,50,100,250,500,1000,2000,4000,8000"}, {"repeats", "3"}},
      {{"experiment", "kernel-approx"}, {"seed", "1"}, {"n_points", "50"}, {"dim", "3"},
       {"bandwidth", "1"}, {"n_grid", "100,1000,10000"}, {"maps", "20"}},
      {{"experiment", "implicit-bias"}, {"seed", "1"}, {"n", "50"}, {"d", "2"}, {"margin", "0.5"},
       {"loss", "logistic"}, {"iters", "100000"}, {"record_every", "1000"}},
      {{"experiment", "polyfit"}, {"seed", "1"}, {"n", "20"}, {"degree", "20"}, {"noise", "0.5"}},
      {{"experiment", "bias-variance"}, {"seed", "1"}, {"degrees", "3,20"}, {"n", "20"},
       {"noise", "0.1"}, {"trials", "2000"}},
      {{"experiment", "emc"}, {"seed", "1"}, {"model", "linear"}, {"d", "30"}, {"eps", "1e-6"}},
  };
  return cfgs;
}

// CSV at threads = 1, rendered once and reused by the determinism check.
std::map<std::string, std::string>& rendered() {
  static std::map<std::string, std::string> cache;
  return cache;
}

std::string render(const std::string& experiment, std::size_t threads = 1) {
  if (threads == 1) {
    if (auto it = rendered().find(experiment); it != rendered().end()) return it->second;
  }
  for (const auto& raw : experiment_configs()) {
    if (raw.at("experiment") != experiment) continue;
    h::Overrides ov;
    ov.threads = threads;
    const std::string csv = h::render_experiment(h::resolve_config(raw, ov)).csv;
    if (threads == 1) rendered()[experiment] = csv;
    return csv;
  }
  throw std::logic_error("no acceptance config for " + experiment);
}

Outcome penrose() {
  Rng rng(20240101);
  std::uniform_int_distribution<int> dim(1, 40);
  double worst = 0.0;
  int deficient = 0;
  for (int k = 0; k < 200; ++k) {
    const Index m = dim(rng), n = dim(rng);
    Matrix a;
    if (k % 2 == 0) {
      a = gaussian(m, n, rng);
    } else {
      const Index r = std::uniform_int_distribution<Index>(1, std::max<Index>(1, std::min(m, n) - 1))(rng);
      a = gaussian(m, r, rng) * gaussian(r, n, rng);
      if (r < std::min(m, n)) ++deficient;
    }
    const Matrix p = linalg::pseudo_inverse(a);
    const Matrix ap = a * p, pa = p * a;
    worst = std::max({worst, (a * pa - a).norm() / a.norm(), (p * ap - p).norm() / p.norm(),
                      (ap.transpose() - ap).norm() / ap.norm(),
                      (pa.transpose() - pa).norm() / pa.norm()});
  }
  return {worst <= 1e-8, "worst relative residual " + fmt(worst) + " over 200 matrices (" +
                             std::to_string(deficient) + " rank-deficient)"};
}

Outcome gd_min_norm() {
  Rng rng(20240102);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_zero = 0.0, worst_shift = 0.0, worst_mixed = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Matrix x = gaussian(10, 50, rng);
    const Vector y = gaussian(10, 1, rng);
    const Vector w_star = linalg::pseudo_inverse(x) * y;
    descent::GDConfig cfg;
    cfg.step_size = 0.9 / std::pow(linalg::max_singular_value(x), 2);
    cfg.max_iters = 500000;
    cfg.grad_tol = 1e-13;
    cfg.record_every = 100000;
    const auto a = descent::gd_least_squares(x, y, Vector::Zero(50), cfg);
    worst_zero = std::max(worst_zero, (a.final_w - w_star).norm() / w_star.norm());
    const Vector v = linalg::kernel_projector(x) * Vector(gaussian(50, 1, rng));
    const auto b = descent::gd_least_squares(x, y, w_star + v, cfg);
    worst_shift = std::max(worst_shift, (b.final_w - (w_star + v)).norm() / (w_star + v).norm());
    // same limit from v plus an arbitrary row-space component
    const Vector u = x.transpose() * Vector(gaussian(10, 1, rng));
    const auto c = descent::gd_least_squares(x, y, v + u, cfg);
    worst_mixed = std::max(worst_mixed, (c.final_w - (w_star + v)).norm() / (w_star + v).norm());
  }
  return {worst_zero <= 1e-6 && worst_shift <= 1e-6 && worst_mixed <= 1e-6,
          "worst relative error from 0: " + fmt(worst_zero) + ", from X+y+v: " + fmt(worst_shift) +
              ", from v+X^Tu: " + fmt(worst_mixed)};
}

Outcome risk_curve() {
  const auto rows = parse_csv(render("sparse-risk"));
  const std::vector<std::pair<std::size_t, double>> expected = {
      {0, 1.04}, {20, 1.7242}, {38, 25.74}, {42, 25.44}, {60, 1.5663}, {100, 0.6671}};
  bool ok = true, analytic_ok = true;
  std::string detail;
  for (auto [p, value] : expected) {
    const Row* r = find_row(rows, "p", p);
    if (r == nullptr) return {false, "missing p = " + std::to_string(p)};
    const double analytic = num(*r, "analytic_risk");
    analytic_ok &= std::abs(analytic - value) <= 5e-5 * value;
  }
  ok &= analytic_ok;
  for (std::size_t p : {0, 20, 60, 100}) {
    const Row& r = *find_row(rows, "p", p);
    const double z = (num(r, "mc_risk") - num(r, "analytic_risk")) / num(r, "mc_stderr");
    ok &= std::abs(z) <= 4.0;
    detail += " z(" + std::to_string(p) + ")=" + fmt(z);
  }
  const auto at = [&](std::size_t p, const char* col) { return num(*find_row(rows, "p", p), col); };
  for (const char* col : {"analytic_risk", "mc_risk"}) {
    ok &= at(38, col) > at(20, col) && at(38, col) > at(60, col);
    ok &= at(100, col) < at(0, col);
  }
  return {ok, "analytic values " + std::string(analytic_ok ? "match" : "DIFFER") + ";" + detail + "; peak at 38 " + fmt(at(38, "analytic_risk")) +
                  ", p=100 " + fmt(at(100, "analytic_risk")) + " < p=0 " + fmt(at(0, "analytic_risk"))};
}

Outcome fixed_subset() {
  Rng rng(20240104);
  sparse::GaussianLinearProblem prob;
  prob.w_true = gaussian(20, 1, rng);
  prob.noise_scale = 0.5;
  prob.n = 8;
  sparse::MonteCarloOptions opts;
  opts.trials = 5000;
  opts.seed = 4;
  bool ok = true;
  std::string detail;
  for (std::size_t p : {2, 4, 6, 10, 14, 20}) {
    std::vector<Index> all(20);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Index> kept(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(p));
    const auto sel = sparse::SubsetSelection::from_kept(20, kept);
    const auto analytic = sparse::analytic_risk_fixed_subset(prob.w_true, sel, prob.noise_scale, prob.n);
    const auto mc = sparse::monte_carlo_risk_fixed_subset(prob, sel, opts);
    const double z = (mc.mean - analytic.value()) / mc.std_error;
    ok &= std::abs(z) <= 4.0;
    detail += "p=" + std::to_string(p) + " z=" + fmt(z);
    if (p >= 10) {
      double kept_sq = 0.0;
      for (Index j : kept) kept_sq += prob.w_true(j) * prob.w_true(j);
      const auto proj = sparse::projection_norm_estimate(prob, sel, opts);
      const double zp = (proj.mean - kept_sq * 8.0 / static_cast<double>(p)) / proj.std_error;
      ok &= std::abs(zp) <= 4.0;
      detail += " proj z=" + fmt(zp);
    }
    detail += "; ";
  }
  return {ok, trim_separator(detail)};
}

Outcome kernel_approx() {
  const auto rows = parse_csv(render("kernel-approx"));
  const double e100 = num(*find_row(rows, "n_features", 100), "median_max_abs_err");
  const double e10000 = num(*find_row(rows, "n_features", 10000), "median_max_abs_err");

  // unbiasedness: average z(x)^T z(y) over many maps
  Rng rng(20240105);
  const Matrix pts = gaussian(50, 3, rng);
  const Matrix k = rff::gaussian_kernel_matrix(pts, pts, 1.0);
  const std::size_t maps = 200;
  Matrix sum = Matrix::Zero(50, 50), sum_sq = Matrix::Zero(50, 50);
  for (std::size_t m = 0; m < maps; ++m) {
    const Matrix z = rff::featurize_rows(rff::sample_rff(100, 3, 1.0, derive_seed(5, "unbiased", m)), pts);
    const Matrix g = z * z.transpose();
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  const double mm = static_cast<double>(maps);
  double worst_z = 0.0;
  for (Index i = 0; i < 50; ++i) {
    for (Index j = i + 1; j < 50; ++j) {
      const double mean = sum(i, j) / mm;
      const double var = (sum_sq(i, j) - mm * mean * mean) / (mm - 1.0);
      worst_z = std::max(worst_z, std::abs(mean - k(i, j)) / std::sqrt(var / mm));
    }
  }
  return {e100 / e10000 >= 5.0 && worst_z <= 5.0,
          "median max error " + fmt(e100) + " -> " + fmt(e10000) + " (" + fmt(e100 / e10000) +
              "x); worst unbiasedness z " + fmt(worst_z) + " over 1225 pairs"};
}

Outcome rff_double_descent() {
  const std::string csv = render("rff-sweep");
  const auto rows = parse_csv(csv);
  const std::string source = csv.find("resolved_data = mnist") != std::string::npos ? "mnist" : "synthetic";
  const Row* at_n = find_row(rows, "n_features", 1000);
  const Row* at_8n = find_row(rows, "n_features", 8000);
  if (at_n == nullptr || at_8n == nullptr) return {false, "sweep rows missing"};
  bool ok = num(*at_n, "test_mse") > num(*at_8n, "test_mse");
  double worst_train = 0.0, prev_beta = INFINITY;
  bool beta_ok = true;
  for (const auto& r : rows) {
    if (num(r, "n_features") < 1000) continue;
    worst_train = std::max(worst_train, num(r, "train_mse"));
    beta_ok &= num(r, "beta_norm") <= prev_beta;
    prev_beta = num(r, "beta_norm");
  }
  ok &= worst_train <= 1e-6 && beta_ok;
  return {ok, source + " data: test mse " + fmt(num(*at_n, "test_mse")) + " at N=n vs " +
                  fmt(num(*at_8n, "test_mse")) + " at N=8n; max train mse " + fmt(worst_train) +
                  " for N>=n; beta norm nonincreasing: " + (beta_ok ? "yes" : "no")};
}

Outcome implicit_bias() {
  const auto data = separable::generate_separable(50, 2, 0.5, derive_seed(1, "separable", 0));
  const auto loss = descent::SurrogateLoss::logistic();
  descent::GDConfig cfg;
  cfg.step_size = 0.9 * descent::max_stable_step(data.points, *loss.smoothness());
  cfg.max_iters = 100000;
  cfg.grad_tol = 0.0;
  cfg.record_every = 10;
  const auto res = separable::implicit_bias_run(data, loss, cfg);
  const auto& recs = res.trajectory.records;
  bool monotone = true;
  for (std::size_t i = 1; i < recs.size(); ++i) monotone &= recs[i].loss < recs[i - 1].loss;
  const auto step10 = std::find_if(recs.begin(), recs.end(), [](const auto& r) { return r.t == 10; });
  const bool grows = step10 != recs.end() && recs.back().weight_norm > step10->weight_norm;
  const double gap = res.gaps.back().gap;

  int instances = 0;
  double worst = 0.0;
  for (std::size_t n = 2; n <= 8; ++n) {
    for (std::size_t d = 1; d <= 3; ++d) {
      for (std::uint64_t s = 0; s < 10; ++s) {
        const auto small = separable::generate_separable(n, d, 0.1, derive_seed(7, "svm-oracle", 100 * n + 10 * d + s));
        const auto oracle = test::brute_force_svm(small.points, small.labels);
        const auto sol = separable::hard_margin_svm(small);
        const double o = oracle->squaredNorm();
        worst = std::max(worst, std::abs(sol.w.squaredNorm() - o) / o);
        ++instances;
      }
    }
  }
  return {gap < 0.05 && monotone && grows && worst <= 1e-6,
          "final gap " + fmt(gap) + ", loss monotone: " + (monotone ? "yes" : "no") +
              ", |w| grows after step 10: " + (grows ? "yes" : "no") + "; svm vs oracle worst rel " +
              fmt(worst) + " on " + std::to_string(instances) + " instances"};
}

Outcome bias_variance() {
  const auto rows = parse_csv(render("bias-variance"));
  bool ok = rows.size() == 2;
  std::string detail;
  for (const auto& r : rows) {
    const double sum = num(r, "bias_sq") + num(r, "variance") + num(r, "noise_var");
    const double z = (sum - num(r, "total")) / num(r, "total_stderr");
    ok &= std::abs(z) <= 3.0 && r.at("trials") == "2000";
    detail += "degree " + r.at("degree") + ": z=" + fmt(z) + "; ";
  }
  return {ok, trim_separator(detail)};
}

Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const auto& name : h::experiment_names()) {
    const std::string one = render(name, 1);
    const std::string four = render(name, 4);
    const bool same = h::csv_body(one) == h::csv_body(four) && !h::csv_body(one).empty();
    ok &= same;
    if (!same) detail += name + " differs; ";
  }
  return {ok, ok ? "all experiments byte-identical at 1 and 4 threads" : trim_separator(detail)};
}

Outcome emc() {
  const auto rows = parse_csv(render("emc"));
  std::size_t emc = 0;
  for (const auto& r : rows) {
    if (r.at("within_threshold") == "1" || r.at("within_threshold") == "true") {
      emc = std::stoul(r.at("n"));
    } else {
      break;
    }
  }
  // also directly, on a fresh seed
  std::vector<std::size_t> grid;
  for (std::size_t n = 20; n <= 40; ++n) grid.push_back(n);
  const auto scan = h::estimate_emc(h::gaussian_sampler(30, 1.0), h::min_norm_linear_procedure(), 1e-6,
                                    grid, 5, 99);
  return {emc == 30 && scan.emc == 30,
          "emc from experiment " + std::to_string(emc) + ", full grid scan " + std::to_string(scan.emc)};
}

struct Criterion {
  int id;
  std::string name;
  Outcome (*fn)();
  std::optional<double> budget_seconds;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "pseudo-inverse axioms", penrose, 10.0},
      {2, "gradient descent finds the min-norm solution", gd_min_norm, 30.0},
      {3, "random-subset risk curve", risk_curve, 300.0},
      {4, "fixed-subset risk and projection identity", fixed_subset, 180.0},
      {5, "rff kernel approximation", kernel_approx, 120.0},
      {6, "rff double descent", rff_double_descent, 900.0},
      {7, "implicit bias toward max margin", implicit_bias, 120.0},
      {8, "bias-variance identity", bias_variance, 60.0},
      {9, "determinism across thread counts", determinism, std::nullopt},
      {10, "effective model complexity", emc, 30.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    std::string timing = fmt(secs) + " s";
    if (c.budget_seconds) {
      timing += " / " + fmt(*c.budget_seconds) + " s";
      if (secs > *c.budget_seconds) {
        pass = false;
        timing += " OVER BUDGET";
      }
    }
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << out.detail
              << " [" << timing << "]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
