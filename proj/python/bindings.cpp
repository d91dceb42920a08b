#include "descentlab/descent.hpp"
#include "descentlab/harness/config.hpp"
#include "descentlab/harness/emc.hpp"
#include "descentlab/harness/experiments.hpp"
#include "descentlab/linalg.hpp"
#include "descentlab/polyfit.hpp"
#include "descentlab/rff.hpp"
#include "descentlab/separable.hpp"
#include "descentlab/sparse_regression.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

namespace py = pybind11;
namespace dl = descentlab;

namespace {

double risk_to_float(const dl::sparse::RiskValue& r) {
  return r.is_infinite() ? std::numeric_limits<double>::infinity() : r.value();
}

dl::descent::SurrogateLoss loss_from_name(const std::string& name) {
  if (name == "logistic") return dl::descent::SurrogateLoss::logistic();
  if (name == "exponential") return dl::descent::SurrogateLoss::exponential();
  throw dl::InvalidInput("loss must be 'logistic' or 'exponential'");
}

py::dict trajectory_dict(const dl::descent::GDTrajectory& traj) {
  py::list t, loss, norm, margin;
  for (const auto& r : traj.records) {
    t.append(r.t);
    loss.append(r.loss);
    norm.append(r.weight_norm);
    margin.append(r.min_margin ? py::cast(*r.min_margin) : py::none());
  }
  py::dict d;
  d["t"] = t;
  d["loss"] = loss;
  d["weight_norm"] = norm;
  d["min_margin"] = margin;
  d["w"] = traj.final_w;
  d["iterations"] = traj.iterations;
  d["converged"] = traj.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimum-norm interpolation, random features and implicit-bias experiments";

  auto base = py::register_exception<dl::Error>(m, "Error");
  py::register_exception<dl::InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<dl::NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<dl::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<dl::DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<dl::NotSeparableError>(m, "NotSeparableError", base.ptr());
  py::register_exception<dl::FormatError>(m, "FormatError", base.ptr());

  // linalg
  m.def("pseudo_inverse", &dl::linalg::pseudo_inverse, py::arg("a"));
  m.def("min_norm_solve", &dl::linalg::min_norm_solve, py::arg("x"), py::arg("y"));
  m.def(
      "min_norm_least_squares",
      [](const dl::Matrix& x, const dl::Vector& y) {
        return dl::linalg::min_norm_least_squares(x, y).weights;
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "singular_values",
      [](const dl::Matrix& a) { return dl::linalg::svd(a).singular_values; }, py::arg("a"));
  m.def("kernel_projector", &dl::linalg::kernel_projector, py::arg("x"));

  // descent
  m.def(
      "gd_least_squares",
      [](const dl::Matrix& x, const dl::Vector& y, std::optional<dl::Vector> w0, double step_size,
         std::size_t max_iters, double grad_tol, std::size_t record_every) {
        dl::descent::GDConfig cfg{step_size, max_iters, grad_tol, record_every};
        const dl::Vector start = w0 ? *w0 : dl::Vector::Zero(x.cols());
        return trajectory_dict(dl::descent::gd_least_squares(x, y, start, cfg));
      },
      py::arg("x"), py::arg("y"), py::arg("w0") = py::none(), py::arg("step_size"),
      py::arg("max_iters") = 10000, py::arg("grad_tol") = 1e-10, py::arg("record_every") = 100);
  m.def(
      "max_stable_step",
      [](const dl::Matrix& x, const dl::Vector& labels, const std::string& loss) {
        const auto l = loss_from_name(loss);
        const double beta =
            dl::descent::effective_smoothness(l, x, labels, dl::Vector::Zero(x.cols()));
        return dl::descent::max_stable_step(x, beta);
      },
      py::arg("x"), py::arg("labels"), py::arg("loss") = "logistic");

  // sparse regression
  m.def(
      "analytic_risk_random_subset",
      [](double w_norm_sq, double noise_var, std::size_t d, std::size_t n, std::size_t p) {
        return risk_to_float(
            dl::sparse::analytic_risk_random_subset(w_norm_sq, noise_var, d, n, p));
      },
      py::arg("w_norm_sq"), py::arg("noise_var"), py::arg("d"), py::arg("n"), py::arg("p"));
  m.def(
      "analytic_risk_fixed_subset",
      [](const dl::Vector& w, std::vector<dl::Index> kept, double noise_scale, std::size_t n) {
        const auto sel = dl::sparse::SubsetSelection::from_kept(
            static_cast<std::size_t>(w.size()), std::move(kept));
        return risk_to_float(dl::sparse::analytic_risk_fixed_subset(w, sel, noise_scale, n));
      },
      py::arg("w_true"), py::arg("kept"), py::arg("noise_scale"), py::arg("n"));
  m.def(
      "monte_carlo_risk",
      [](const dl::Vector& w, double noise_scale, std::size_t n, std::size_t p,
         std::size_t trials, std::size_t test_points, std::uint64_t seed, std::size_t threads) {
        dl::sparse::GaussianLinearProblem prob{w, noise_scale, n};
        dl::sparse::MonteCarloOptions opts{trials, test_points, seed, threads};
        const auto est = dl::sparse::monte_carlo_risk(prob, p, opts);
        return py::make_tuple(est.mean, est.std_error);
      },
      py::arg("w_true"), py::arg("noise_scale"), py::arg("n"), py::arg("p"),
      py::arg("trials") = 1000, py::arg("test_points") = 100, py::arg("seed") = 0,
      py::arg("threads") = 1);

  // random features
  py::class_<dl::rff::RFFMap>(m, "RFFMap")
      .def_property_readonly("omega", &dl::rff::RFFMap::omega)
      .def_property_readonly("phases", &dl::rff::RFFMap::phases)
      .def_property_readonly("frequency_scale", &dl::rff::RFFMap::frequency_scale)
      .def_property_readonly("kernel_length_scale", &dl::rff::RFFMap::kernel_length_scale)
      .def("featurize",
           [](const dl::rff::RFFMap& map, const dl::Matrix& x) {
             return dl::rff::featurize_rows(map, x);
           });
  m.def("sample_rff", &dl::rff::sample_rff, py::arg("n_features"), py::arg("dim"),
        py::arg("frequency_scale"), py::arg("seed"));
  m.def("gaussian_kernel_matrix", &dl::rff::gaussian_kernel_matrix, py::arg("a"), py::arg("b"),
        py::arg("length_scale"));
  m.def(
      "kernel_approx_error",
      [](const dl::rff::RFFMap& map, const dl::Matrix& points) {
        const auto e = dl::rff::kernel_approx_error(map, points);
        return py::make_tuple(e.max_abs_err, e.mean_abs_err);
      },
      py::arg("map"), py::arg("points"));
  m.def(
      "fit_rff_min_norm",
      [](const dl::rff::RFFMap& map, const dl::Matrix& x, const dl::Matrix& y) {
        return dl::rff::fit_rff_min_norm(map, x, y).beta;
      },
      py::arg("map"), py::arg("x"), py::arg("y"));

  // separable data
  m.def(
      "generate_separable",
      [](std::size_t n, std::size_t d, double margin, std::uint64_t seed) {
        const auto data = dl::separable::generate_separable(n, d, margin, seed);
        return py::make_tuple(data.points, data.labels);
      },
      py::arg("n"), py::arg("d"), py::arg("margin"), py::arg("seed"));
  m.def(
      "hard_margin_svm",
      [](const dl::Matrix& points, const dl::Vector& labels) {
        dl::separable::SeparableDataset data{points, labels, std::nullopt};
        const auto sol = dl::separable::hard_margin_svm(data);
        return py::make_tuple(sol.w, sol.support_indices);
      },
      py::arg("points"), py::arg("labels"));
  m.def("direction_gap", &dl::separable::direction_gap, py::arg("w"), py::arg("reference"));
  m.def(
      "implicit_bias_run",
      [](const dl::Matrix& points, const dl::Vector& labels, const std::string& loss,
         double step_size, std::size_t max_iters, std::size_t record_every, double gap_threshold) {
        dl::separable::SeparableDataset data{points, labels, std::nullopt};
        dl::descent::GDConfig cfg{step_size, max_iters, 1e-10, record_every};
        const auto res =
            dl::separable::implicit_bias_run(data, loss_from_name(loss), cfg, gap_threshold);
        py::dict d = trajectory_dict(res.trajectory);
        py::list gaps;
        for (const auto& g : res.gaps) {
          gaps.append(py::make_tuple(g.t, g.gap));
        }
        d["gaps"] = gaps;
        d["svm_w"] = res.svm.w;
        d["direction_converged"] = res.direction_converged;
        return d;
      },
      py::arg("points"), py::arg("labels"), py::arg("loss") = "logistic", py::arg("step_size"),
      py::arg("max_iters") = 100000, py::arg("record_every") = 100,
      py::arg("gap_threshold") = 0.05);

  // polynomial fitting
  m.def(
      "legendre_design",
      [](const dl::Vector& xs, std::size_t degree) {
        return dl::polyfit::legendre_design(xs, degree).design;
      },
      py::arg("xs"), py::arg("degree"));
  m.def("evaluate_legendre", &dl::polyfit::evaluate_legendre, py::arg("coeffs"), py::arg("xs"));
  m.def(
      "fit_poly_min_norm",
      [](const dl::Vector& xs, const dl::Vector& ys, std::size_t degree, const std::string& method) {
        dl::polyfit::PolyFitOptions opts;
        if (method == "gd") {
          opts.method = dl::polyfit::FitMethod::gradient_descent;
        } else if (method != "pinv") {
          throw dl::InvalidInput("method must be 'pinv' or 'gd'");
        }
        return dl::polyfit::fit_poly_min_norm(xs, ys, degree, opts);
      },
      py::arg("xs"), py::arg("ys"), py::arg("degree"), py::arg("method") = "pinv");
  m.def(
      "bias_variance",
      [](std::vector<double> coeffs, std::size_t degree, std::size_t n, double noise,
         std::size_t trials, std::uint64_t seed) {
        const dl::polyfit::TruthFn truth = [coeffs](double x) {
          double acc = 0.0;
          for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
          return acc;
        };
        dl::polyfit::BiasVarianceOptions opts;
        opts.n = n;
        opts.noise = noise;
        opts.trials = trials;
        opts.seed = seed;
        const auto r = dl::polyfit::bias_variance_decompose(
            truth, dl::polyfit::legendre_fitter(degree), opts);
        py::dict d;
        d["bias_sq"] = r.bias_sq;
        d["variance"] = r.variance;
        d["noise"] = r.noise;
        d["total"] = r.total;
        d["total_stderr"] = r.total_stderr;
        return d;
      },
      py::arg("truth_coeffs"), py::arg("degree"), py::arg("n") = 20, py::arg("noise") = 0.1,
      py::arg("trials") = 2000, py::arg("seed") = 0);

  // harness
  m.def(
      "estimate_emc_linear",
      [](std::size_t d, double noise, double eps, std::vector<std::size_t> n_grid,
         std::size_t trials, std::uint64_t seed) {
        return dl::harness::estimate_emc(dl::harness::gaussian_sampler(d, noise),
                                         dl::harness::min_norm_linear_procedure(), eps, n_grid,
                                         trials, seed)
            .emc;
      },
      py::arg("d"), py::arg("noise"), py::arg("eps"), py::arg("n_grid"), py::arg("trials") = 5,
      py::arg("seed") = 0);
  m.def("experiment_names", &dl::harness::experiment_names);
  m.def(
      "render_experiment",
      [](const std::string& experiment, const std::map<std::string, std::string>& params,
         std::uint64_t seed, std::size_t threads) {
        dl::harness::Overrides ov;
        ov.experiment = experiment;
        ov.seed = seed;
        ov.threads = threads;
        const auto cfg = dl::harness::resolve_config(params, ov);
        return dl::harness::render_experiment(cfg).csv;
      },
      py::arg("experiment"), py::arg("params") = std::map<std::string, std::string>{},
      py::arg("seed") = 0, py::arg("threads") = 1);
}
