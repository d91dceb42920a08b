#include "descentlab/rff.hpp"

#include "descentlab/harness/seeds.hpp"
#include "descentlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace descentlab::rff {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

int argmax_row(const Matrix& m, Index i) {
  Index best = 0;
  m.row(i).maxCoeff(&best);
  return static_cast<int>(best);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

RFFMap::RFFMap(Matrix omega, Vector phases, double frequency_scale)
    : omega_(std::move(omega)), phases_(std::move(phases)), frequency_scale_(frequency_scale) {
  require_positive(frequency_scale_, "RFFMap: frequency scale");
  if (phases_.size() != omega_.rows()) {
    throw InvalidInput("RFFMap: phase count does not match frequency rows");
  }
  if (!omega_.allFinite() || !phases_.allFinite()) {
    throw InvalidInput("RFFMap: non-finite parameters");
  }
}

RFFMap sample_rff(std::size_t n_features, std::size_t dim, double frequency_scale,
                  std::uint64_t seed) {
  require_positive(frequency_scale, "sample_rff: frequency scale");
  if (n_features < 1 || dim < 1) {
    throw InvalidInput("sample_rff: n_features and dim must be at least 1");
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, frequency_scale);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Matrix omega(static_cast<Index>(n_features), static_cast<Index>(dim));
  for (Index i = 0; i < omega.rows(); ++i) {
    for (Index j = 0; j < omega.cols(); ++j) {
      omega(i, j) = normal(rng);
    }
  }
  Vector b(static_cast<Index>(n_features));
  for (Index i = 0; i < b.size(); ++i) {
    b(i) = phase(rng);
  }
  return RFFMap(std::move(omega), std::move(b), frequency_scale);
}

Vector featurize(const RFFMap& map, const Vector& x) {
  if (x.size() != map.dim()) {
    throw InvalidInput("featurize: input dimension " + std::to_string(x.size()) +
                       " does not match map dimension " + std::to_string(map.dim()));
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(map.n_features()));
  return scale * (map.omega() * x + map.phases()).array().cos().matrix();
}

Matrix featurize_rows(const RFFMap& map, const Matrix& x) {
  if (x.cols() != map.dim()) {
    throw InvalidInput("featurize_rows: input dimension does not match map dimension");
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(map.n_features()));
  Matrix z = x * map.omega().transpose();
  z.rowwise() += map.phases().transpose();
  return scale * z.array().cos().matrix();
}

double gaussian_kernel(const Vector& x, const Vector& y, double length_scale) {
  require_positive(length_scale, "gaussian_kernel: length scale");
  if (x.size() != y.size()) {
    throw InvalidInput("gaussian_kernel: dimension mismatch");
  }
  return std::exp(-(x - y).squaredNorm() / (2.0 * length_scale * length_scale));
}

Matrix gaussian_kernel_matrix(const Matrix& a, const Matrix& b, double length_scale) {
  require_positive(length_scale, "gaussian_kernel_matrix: length scale");
  if (a.cols() != b.cols()) {
    throw InvalidInput("gaussian_kernel_matrix: dimension mismatch");
  }
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix sq = -2.0 * a * b.transpose();
  sq.colwise() += an;
  sq.rowwise() += bn.transpose();
  const double inv = 1.0 / (2.0 * length_scale * length_scale);
  return (-(sq.array().max(0.0)) * inv).exp().matrix();
}

KernelApproxError kernel_approx_error(const RFFMap& map, const Matrix& points) {
  if (points.rows() < 2) {
    throw InvalidInput("kernel_approx_error: need at least two points");
  }
  const Matrix z = featurize_rows(map, points);
  const Matrix approx = z * z.transpose();
  const double ell = map.kernel_length_scale();
  KernelApproxError out;
  double total = 0.0;
  std::size_t pairs = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = i + 1; j < points.rows(); ++j) {
      const double exact = gaussian_kernel(points.row(i).transpose(), points.row(j).transpose(), ell);
      const double err = std::abs(approx(i, j) - exact);
      out.max_abs_err = std::max(out.max_abs_err, err);
      total += err;
      ++pairs;
    }
  }
  out.mean_abs_err = total / static_cast<double>(pairs);
  return out;
}

Matrix RFFPredictor::predict(const Matrix& x) const { return featurize_rows(map, x) * beta; }

RFFPredictor fit_rff_min_norm(const RFFMap& map, const Matrix& x_train, const Matrix& y_train) {
  if (x_train.rows() != y_train.rows()) {
    throw InvalidInput("fit_rff_min_norm: sample count mismatch between inputs and targets");
  }
  const Matrix z = featurize_rows(map, x_train);
  return RFFPredictor{map, linalg::min_norm_solve(z, y_train)};
}

RFFPredictor fit_rff_min_norm(const RFFMap& map, const Matrix& x_train, const Vector& y_train) {
  return fit_rff_min_norm(map, x_train, Matrix(y_train));
}

Matrix KernelInterpolant::predict(const Matrix& x) const {
  return gaussian_kernel_matrix(x, centers, length_scale) * alpha;
}

KernelInterpolant fit_kernel_interpolant(const Matrix& x_train, const Matrix& y_train,
                                         double length_scale) {
  if (x_train.rows() != y_train.rows()) {
    throw InvalidInput("fit_kernel_interpolant: sample count mismatch");
  }
  const Matrix k = gaussian_kernel_matrix(x_train, x_train, length_scale);
  const linalg::SvdResult dec = linalg::svd(k);
  KernelInterpolant out;
  out.centers = x_train;
  out.length_scale = length_scale;
  out.alpha = dec.vt.transpose() *
              (dec.singular_values.cwiseInverse().asDiagonal() * (dec.u.transpose() * y_train));
  if (dec.rank < std::min(k.rows(), k.cols())) {
    out.condition_estimate = std::numeric_limits<double>::infinity();
  } else {
    out.condition_estimate = dec.singular_values(0) / dec.singular_values(dec.rank - 1);
  }
  out.ill_conditioned = out.condition_estimate > kIllConditionedThreshold;
  return out;
}

double mean_squared_error(const Matrix& predicted, const Matrix& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols()) {
    throw InvalidInput("mean_squared_error: shape mismatch");
  }
  if (predicted.rows() == 0) {
    return 0.0;
  }
  return (predicted - target).squaredNorm() / static_cast<double>(predicted.rows());
}

std::vector<SweepRow> rff_double_descent_sweep(const SplitDataset& data, const SweepOptions& opts) {
  require_positive(opts.length_scale, "rff_double_descent_sweep: length scale");
  if (opts.repeats < 1) {
    throw InvalidInput("rff_double_descent_sweep: repeats must be at least 1");
  }
  const bool classify = data.test_classes.has_value();
  const auto dim = static_cast<std::size_t>(data.x_train.cols());

  struct Outcome {
    double train = 0.0;
    double test = 0.0;
    double zero_one = 0.0;
    double norm = 0.0;
  };

  std::vector<SweepRow> rows;
  for (std::size_t n_features : opts.n_grid) {
    std::vector<Outcome> outcomes(opts.repeats);
    parallel_for(opts.repeats, opts.threads, [&](std::size_t r) {
      const RFFMap map = sample_rff(n_features, dim, 1.0 / opts.length_scale,
                                    derive_seed(opts.seed, "rff-sweep", n_features * 1000003ULL + r));
      const RFFPredictor fit = fit_rff_min_norm(map, data.x_train, data.y_train);
      Outcome& o = outcomes[r];
      o.train = mean_squared_error(fit.predict(data.x_train), data.y_train);
      const Matrix test_pred = fit.predict(data.x_test);
      o.test = mean_squared_error(test_pred, data.y_test);
      o.norm = fit.beta.norm();
      if (classify) {
        std::size_t wrong = 0;
        for (Index i = 0; i < test_pred.rows(); ++i) {
          wrong += argmax_row(test_pred, i) != (*data.test_classes)[static_cast<std::size_t>(i)];
        }
        o.zero_one = static_cast<double>(wrong) / static_cast<double>(test_pred.rows());
      }
    });

    SweepRow row;
    row.n_features = n_features;
    row.repeats = opts.repeats;
    std::vector<double> norms;
    double zero_one = 0.0;
    for (const Outcome& o : outcomes) {
      row.train_mse += o.train;
      row.test_mse += o.test;
      zero_one += o.zero_one;
      norms.push_back(o.norm);
    }
    const auto reps = static_cast<double>(opts.repeats);
    row.train_mse /= reps;
    row.test_mse /= reps;
    if (classify) {
      row.test_zero_one = zero_one / reps;
    }
    row.beta_norm = median_of(std::move(norms));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace descentlab::rff
