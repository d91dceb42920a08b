#include "descentlab/harness/experiments.hpp"

#include "descentlab/descent.hpp"
#include "descentlab/harness/csv.hpp"
#include "descentlab/harness/datasets.hpp"
#include "descentlab/harness/emc.hpp"
#include "descentlab/harness/seeds.hpp"
#include "descentlab/polyfit.hpp"
#include "descentlab/rff.hpp"
#include "descentlab/separable.hpp"
#include "descentlab/sparse_regression.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace descentlab::harness {
namespace {

using Comments = std::vector<std::string>;

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double monomial(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

ExperimentOutput finish(const ExperimentConfig& cfg, const CsvTable& table, Comments extra,
                        std::string summary) {
  Comments comments = cfg.echo();
  comments.insert(comments.end(), extra.begin(), extra.end());
  return {table.render(comments), std::move(summary)};
}

ExperimentOutput sparse_risk(const ExperimentConfig& cfg) {
  const std::size_t d = cfg.count("d");
  sparse::GaussianLinearProblem problem;
  problem.w_true = Vector::Constant(static_cast<Index>(d),
                                    std::sqrt(cfg.real("w_norm_sq") / static_cast<double>(d)));
  problem.noise_scale = std::sqrt(cfg.real("noise_var"));
  problem.n = cfg.count("n");
  sparse::MonteCarloOptions opts;
  opts.trials = cfg.count("trials");
  opts.test_points = cfg.count("test_points");
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;

  CsvTable table({"p", "analytic_risk", "mc_risk", "mc_stderr", "trials"});
  for (const auto& row : sparse::risk_curve(problem, cfg.counts("p_grid"), opts)) {
    table.add_row({fmt(row.p), row.analytic_risk.to_string(), fmt(row.mc_risk), fmt(row.mc_stderr),
                   fmt(row.trials)});
  }
  return finish(cfg, table, {}, std::to_string(table.size()) + " risk-curve rows");
}

ExperimentOutput rff_sweep(const ExperimentConfig& cfg) {
  const std::string& source = cfg.text("data");
  if (source != "auto" && source != "mnist" && source != "synthetic") {
    throw ConfigError("rff-sweep: data must be auto, mnist or synthetic");
  }
  const std::size_t n_train = cfg.count("n_train");
  const std::size_t n_test = cfg.count("n_test");
  std::optional<std::filesystem::path> mnist_dir;
  if (source != "synthetic") {
    mnist_dir = find_mnist_dir();
    if (!mnist_dir && source == "mnist") {
      throw Error(std::string("rff-sweep: MNIST files not found; set ") + kDataDirEnv);
    }
  }

  LabeledDataset data;
  rff::SweepOptions opts;
  if (mnist_dir) {
    data = load_mnist_subset(*mnist_dir, n_train, n_test, derive_seed(cfg.seed, "rff-data", 0));
    opts.length_scale = cfg.real("bandwidth");
  } else {
    SyntheticParams sp;
    sp.n_train = n_train;
    sp.n_test = n_test;
    sp.dim = cfg.count("synthetic_dim");
    sp.centers = cfg.count("synthetic_centers");
    sp.length_scale = cfg.real("synthetic_bandwidth");
    sp.noise = cfg.real("synthetic_noise");
    data = make_synthetic_regression(SyntheticKind::rkhs_target, sp,
                                     derive_seed(cfg.seed, "rff-data", 0));
    opts.length_scale = sp.length_scale;
  }
  opts.n_grid = cfg.counts("n_grid");
  opts.repeats = cfg.count("repeats");
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;

  CsvTable table({"n_features", "train_mse", "test_mse", "test_zero_one", "beta_norm", "repeats"});
  for (const auto& row : rff::rff_double_descent_sweep(data.split(), opts)) {
    table.add_row({fmt(row.n_features), fmt(row.train_mse), fmt(row.test_mse),
                   row.test_zero_one ? fmt(*row.test_zero_one) : std::string(), fmt(row.beta_norm),
                   fmt(row.repeats)});
  }
  const double n = static_cast<double>(n_train);
  Comments extra = {"resolved_data = " + std::string(mnist_dir ? "mnist" : "synthetic"),
                    "feature_scaling = " + data.feature_scaling,
                    "sqrt_n_log_n = " + fmt(std::sqrt(n) * std::log(n))};
  return finish(cfg, table, std::move(extra),
                std::to_string(table.size()) + " sweep rows (" +
                    (mnist_dir ? "mnist" : "synthetic") + " data)");
}

ExperimentOutput kernel_approx(const ExperimentConfig& cfg) {
  const std::size_t n_points = cfg.count("n_points");
  const std::size_t dim = cfg.count("dim");
  const std::size_t maps = cfg.count("maps");
  const double bandwidth = cfg.real("bandwidth");
  if (maps < 1) {
    throw ConfigError("kernel-approx: maps must be at least 1");
  }
  Rng rng = make_rng(cfg.seed, "kernel-points", 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix points(static_cast<Index>(n_points), static_cast<Index>(dim));
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      points(i, j) = normal(rng);
    }
  }
  CsvTable table({"n_features", "median_max_abs_err", "median_mean_abs_err", "maps"});
  for (std::size_t n_features : cfg.counts("n_grid")) {
    std::vector<double> max_err(maps);
    std::vector<double> mean_err(maps);
    parallel_for(maps, cfg.threads, [&](std::size_t m) {
      const rff::RFFMap map = rff::sample_rff(
          n_features, dim, 1.0 / bandwidth,
          derive_seed(cfg.seed, "kernel-approx", n_features * 1000003ULL + m));
      const rff::KernelApproxError err = rff::kernel_approx_error(map, points);
      max_err[m] = err.max_abs_err;
      mean_err[m] = err.mean_abs_err;
    });
    table.add_row({fmt(n_features), fmt(median(max_err)), fmt(median(mean_err)), fmt(maps)});
  }
  return finish(cfg, table, {}, std::to_string(table.size()) + " kernel-approximation rows");
}

ExperimentOutput implicit_bias(const ExperimentConfig& cfg) {
  const std::string& loss_name = cfg.text("loss");
  if (loss_name != "logistic" && loss_name != "exponential") {
    throw ConfigError("implicit-bias: loss must be logistic or exponential");
  }
  const descent::SurrogateLoss loss = loss_name == "logistic" ? descent::SurrogateLoss::logistic()
                                                              : descent::SurrogateLoss::exponential();
  const separable::SeparableDataset data = separable::generate_separable(
      cfg.count("n"), cfg.count("d"), cfg.real("margin"), derive_seed(cfg.seed, "separable", 0));
  const Vector w0 = Vector::Zero(data.points.cols());
  const double beta = descent::effective_smoothness(loss, data.points, data.labels, w0);
  descent::GDConfig gd;
  gd.step_size = cfg.real("step_fraction") * descent::max_stable_step(data.points, beta);
  gd.max_iters = cfg.count("iters");
  gd.record_every = cfg.count("record_every");
  const separable::ImplicitBiasResult res =
      separable::implicit_bias_run(data, loss, gd, cfg.real("gap_threshold"), w0);

  CsvTable table({"t", "loss", "w_norm", "min_margin", "direction_gap"});
  std::size_t g = 0;
  for (const auto& rec : res.trajectory.records) {
    std::string gap;
    if (g < res.gaps.size() && res.gaps[g].t == rec.t) {
      gap = fmt(res.gaps[g++].gap);
    }
    table.add_row({fmt(rec.t), fmt(rec.loss), fmt(rec.weight_norm),
                   rec.min_margin ? fmt(*rec.min_margin) : std::string(), gap});
  }
  const double final_gap = res.gaps.empty() ? std::nan("") : res.gaps.back().gap;
  Comments extra = {"step_size = " + fmt(gd.step_size), "svm_margin = " + fmt(1.0 / res.svm.w.norm())};
  return finish(cfg, table, std::move(extra),
                "final direction gap " + fmt(final_gap) +
                    (res.direction_converged ? " (converged)" : " (not converged)"));
}

ExperimentOutput polyfit_demo(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.count("n");
  const double noise = cfg.real("noise");
  const std::string& method = cfg.text("method");
  if (method != "pinv" && method != "gd") {
    throw ConfigError("polyfit: method must be pinv or gd");
  }
  Rng rng = make_rng(cfg.seed, "polyfit", 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> coeffs = cfg.reals("truth_coeffs");
  if (coeffs.empty()) {
    coeffs.resize(4);
    for (double& c : coeffs) {
      c = normal(rng);
    }
  }
  Vector xs(static_cast<Index>(n));
  Vector ys(xs.size());
  for (Index i = 0; i < xs.size(); ++i) {
    xs(i) = unif(rng);
    ys(i) = monomial(coeffs, xs(i)) + noise * normal(rng);
  }
  polyfit::PolyFitOptions opts;
  opts.method = method == "gd" ? polyfit::FitMethod::gradient_descent
                               : polyfit::FitMethod::pseudo_inverse;
  const Vector fit = polyfit::fit_poly_min_norm(xs, ys, cfg.count("degree"), opts);
  const Vector grid = Vector::LinSpaced(static_cast<Index>(cfg.count("grid_points")), -1.0, 1.0);
  const Vector pred = polyfit::evaluate_legendre(fit, grid);

  CsvTable table({"x", "truth", "prediction"});
  double sup = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    const double truth = monomial(coeffs, grid(i));
    sup = std::max(sup, std::abs(truth - pred(i)));
    table.add_row({fmt(grid(i)), fmt(truth), fmt(pred(i))});
  }
  std::string coeff_text;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    coeff_text += (i ? "," : "") + fmt(coeffs[i]);
  }
  return finish(cfg, table, {"resolved_truth_coeffs = " + coeff_text},
                "sup-norm distance to truth " + fmt(sup));
}

ExperimentOutput bias_variance(const ExperimentConfig& cfg) {
  const std::vector<double> coeffs = cfg.reals("truth_coeffs");
  const polyfit::TruthFn truth = [coeffs](double x) { return monomial(coeffs, x); };
  CsvTable table({"degree", "n", "noise", "bias_sq", "variance", "noise_var", "total",
                  "total_stderr", "trials"});
  for (std::size_t degree : cfg.counts("degrees")) {
    polyfit::BiasVarianceOptions opts;
    opts.n = cfg.count("n");
    opts.noise = cfg.real("noise");
    opts.trials = cfg.count("trials");
    opts.seed = derive_seed(cfg.seed, "bias-variance", degree);
    opts.threads = cfg.threads;
    opts.probe = Vector::LinSpaced(static_cast<Index>(cfg.count("probe_points")), -1.0, 1.0);
    const auto r = polyfit::bias_variance_decompose(truth, polyfit::legendre_fitter(degree), opts);
    table.add_row({fmt(degree), fmt(opts.n), fmt(opts.noise), fmt(r.bias_sq), fmt(r.variance),
                   fmt(r.noise), fmt(r.total), fmt(r.total_stderr), fmt(r.trials)});
  }
  return finish(cfg, table, {}, std::to_string(table.size()) + " decomposition rows");
}

ExperimentOutput emc(const ExperimentConfig& cfg) {
  const std::string& model = cfg.text("model");
  TrainingProcedure procedure;
  if (model == "linear") {
    procedure = min_norm_linear_procedure();
  } else if (model == "rff") {
    procedure = rff_procedure(cfg.count("n_features"), cfg.real("bandwidth"));
  } else {
    throw ConfigError("emc: model must be linear or rff");
  }
  const EmcScan scan = estimate_emc(gaussian_sampler(cfg.count("d"), cfg.real("noise")), procedure,
                                    cfg.real("eps"), cfg.counts("n_grid"), cfg.count("trials"),
                                    cfg.seed, cfg.threads);
  CsvTable table({"n", "mean_train_error", "within_threshold"});
  for (const EmcPoint& p : scan.points) {
    table.add_row({fmt(p.n), fmt(p.mean_train_error), p.within_threshold ? "1" : "0"});
  }
  return finish(cfg, table, {}, "emc = " + std::to_string(scan.emc));
}

}  // namespace

ExperimentOutput render_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "sparse-risk") return sparse_risk(cfg);
  if (cfg.experiment == "rff-sweep") return rff_sweep(cfg);
  if (cfg.experiment == "kernel-approx") return kernel_approx(cfg);
  if (cfg.experiment == "implicit-bias") return implicit_bias(cfg);
  if (cfg.experiment == "polyfit") return polyfit_demo(cfg);
  if (cfg.experiment == "bias-variance") return bias_variance(cfg);
  if (cfg.experiment == "emc") return emc(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentOutput result = render_experiment(cfg);
    write_atomically(cfg.output_path, result.csv);
    out << cfg.experiment << ": " << result.summary << " -> " << cfg.output_path << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << cfg.experiment << ": config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << cfg.experiment << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace descentlab::harness
