#include "descentlab/linalg.hpp"
#include "descentlab/polyfit.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace descentlab;
using namespace descentlab::polyfit;

namespace {

double cubic(const Vector& c, double x) { return c(0) + x * (c(1) + x * (c(2) + x * c(3))); }

// Monomial cubic expressed in the Legendre basis, by hand:
// x^2 = (P0 + 2 P2) / 3, x^3 = (3 P1 + 2 P3) / 5.
Vector cubic_to_legendre(const Vector& c) {
  Vector out(4);
  out << c(0) + c(2) / 3.0, c(1) + 3.0 * c(3) / 5.0, 2.0 * c(2) / 3.0, 2.0 * c(3) / 5.0;
  return out;
}

}  // namespace

TEST_CASE("legendre design: endpoint and hand-computed values") {
  Vector ones(1);
  ones << 1.0;
  const auto at_one = legendre_design(ones, 30);
  CHECK(at_one.design.cols() == 31);
  for (Index k = 0; k <= 30; ++k) {
    CHECK(at_one.design(0, k) == doctest::Approx(1.0).epsilon(1e-12));
  }
  Vector minus(1);
  minus << -1.0;
  const auto at_minus = legendre_design(minus, 9);
  for (Index k = 0; k <= 9; ++k) {
    CHECK(at_minus.design(0, k) == doctest::Approx(k % 2 == 0 ? 1.0 : -1.0));
  }
  const auto at_zero = legendre_design(Vector::Zero(1), 2);
  CHECK(at_zero.design(0, 0) == 1.0);
  CHECK(at_zero.design(0, 1) == 0.0);
  CHECK(at_zero.design(0, 2) == doctest::Approx(-0.5));
  Vector half(1);
  half << 0.5;
  // P3(x) = (5x^3 - 3x) / 2
  CHECK(legendre_design(half, 3).design(0, 3) == doctest::Approx((5 * 0.125 - 1.5) / 2));
}

TEST_CASE("legendre design: orthogonality by quadrature") {
  const Index m = 1000;
  Vector mid(m);
  for (Index i = 0; i < m; ++i) {
    mid(i) = -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
  }
  const Matrix p = legendre_design(mid, 8).design;
  const Matrix gram = p.transpose() * p * (2.0 / static_cast<double>(m));
  for (Index j = 0; j <= 8; ++j) {
    for (Index k = 0; k <= 8; ++k) {
      const double expected = j == k ? 2.0 / (2.0 * static_cast<double>(k) + 1.0) : 0.0;
      CHECK(gram(j, k) == doctest::Approx(expected).epsilon(1e-3).scale(1.0));
    }
  }
}

TEST_CASE("legendre design rejects inputs outside [-1, 1]") {
  Vector xs(2);
  xs << 0.5, 1.0 + 1e-9;
  CHECK_THROWS_AS(legendre_design(xs, 3), InvalidInput);
}

TEST_CASE("rescale to unit interval") {
  Vector xs(3);
  xs << 2.0, 3.0, 4.0;
  const Vector r = rescale_to_unit_interval(xs, 2.0, 4.0);
  CHECK(r(0) == doctest::Approx(-1.0));
  CHECK(r(1) == doctest::Approx(0.0));
  CHECK(r(2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rescale_to_unit_interval(xs, 1.0, 1.0), InvalidInput);
}

TEST_CASE("evaluate legendre agrees with the design matrix") {
  Rng rng(31);
  const Vector coeffs = test::gaussian_vector(6, rng);
  const Vector xs = Vector::LinSpaced(11, -1.0, 1.0);
  const Vector direct = legendre_design(xs, 5).design * coeffs;
  CHECK((evaluate_legendre(coeffs, xs) - direct).norm() <= 1e-12);
}

TEST_CASE("overparameterized fit interpolates") {
  Rng rng(32);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector xs(12), ys(12);
  for (Index i = 0; i < 12; ++i) {
    xs(i) = unif(rng);
  }
  ys = test::gaussian_vector(12, rng);
  for (std::size_t degree : {11u, 40u}) {
    const Vector c = fit_poly_min_norm(xs, ys, degree);
    CHECK((evaluate_legendre(c, xs) - ys).norm() <= 1e-8);
  }
}

TEST_CASE("noiseless cubic is recovered") {
  Rng rng(33);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Vector mono = test::gaussian_vector(4, rng);
  Vector xs(20), ys(20);
  for (Index i = 0; i < 20; ++i) {
    xs(i) = unif(rng);
    ys(i) = cubic(mono, xs(i));
  }
  const Vector c = fit_poly_min_norm(xs, ys, 3);
  CHECK((c - cubic_to_legendre(mono)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("gradient-descent fit matches the pseudo-inverse fit") {
  Rng rng(34);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector xs(10), ys(10);
  for (Index i = 0; i < 10; ++i) {
    xs(i) = unif(rng);
  }
  ys = test::gaussian_vector(10, rng);
  for (std::size_t degree : {3u, 15u}) {
    PolyFitOptions gd;
    gd.method = FitMethod::gradient_descent;
    const Vector a = fit_poly_min_norm(xs, ys, degree);
    const Vector b = fit_poly_min_norm(xs, ys, degree, gd);
    CHECK((a - b).norm() <= 1e-5 * a.norm());
  }
  CHECK_THROWS_AS(fit_poly_min_norm(xs, Vector::Zero(3), 3), InvalidInput);
}

TEST_CASE("degree-1000 fit is closer to the cubic than degree-20") {
  // n = 20 noisy samples of a random cubic, sup-norm on a 512-point grid,
  // median over 20 seeds
  const Vector grid = Vector::LinSpaced(512, -1.0, 1.0);
  std::vector<double> sup20, sup1000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = make_rng(seed, "smoothness-demo", 0);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Vector mono = test::gaussian_vector(4, rng);
    Vector xs(20), ys(20);
    for (Index i = 0; i < 20; ++i) {
      xs(i) = unif(rng);
      ys(i) = cubic(mono, xs(i)) + 0.5 * normal(rng);
    }
    Vector truth(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
      truth(i) = cubic(mono, grid(i));
    }
    for (auto [degree, out] : {std::pair{std::size_t{20}, &sup20}, std::pair{std::size_t{1000}, &sup1000}}) {
      const Vector c = fit_poly_min_norm(xs, ys, degree);
      out->push_back((evaluate_legendre(c, grid) - truth).cwiseAbs().maxCoeff());
    }
  }
  MESSAGE("median sup-norm: degree 20 = " << test::median(sup20)
                                          << ", degree 1000 = " << test::median(sup1000));
  CHECK(test::median(sup1000) < test::median(sup20));
}

TEST_CASE("bias-variance: perfect estimator") {
  const auto truth = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x; };
  BiasVarianceOptions opts;
  opts.noise = 0.0;
  opts.trials = 50;
  opts.seed = 5;
  const auto r = bias_variance_decompose(truth, legendre_fitter(3), opts);
  CHECK(r.bias_sq <= 1e-20);
  CHECK(r.variance <= 1e-20);
  CHECK(r.total <= 1e-20);
  CHECK(r.noise == 0.0);
}

TEST_CASE("bias-variance: zero estimator against a constant") {
  const double c = 1.7;
  const auto truth = [c](double) { return c; };
  const Fitter zero = [](const Vector&, const Vector&, const Vector& probe) {
    return Vector::Zero(probe.size()).eval();
  };
  BiasVarianceOptions opts;
  opts.noise = 0.3;
  opts.trials = 4000;
  const auto r = bias_variance_decompose(truth, zero, opts);
  CHECK(r.bias_sq == doctest::Approx(c * c));
  CHECK(r.variance == 0.0);
  CHECK(r.noise == doctest::Approx(0.09));
  CHECK(std::abs(r.total - (c * c + 0.09)) <= 4.0 * r.total_stderr);
}

TEST_CASE("bias-variance: decomposition identity") {
  const auto truth = [](double x) { return 0.3 + x - 1.5 * x * x * x; };
  for (std::size_t degree : {3u, 8u}) {
    BiasVarianceOptions opts;
    opts.n = 20;
    opts.noise = 0.1;
    opts.trials = 2000;
    opts.seed = 40 + degree;
    const auto r = bias_variance_decompose(truth, legendre_fitter(degree), opts);
    const double sum = r.bias_sq + r.variance + r.noise;
    CHECK(std::abs(sum - r.total) <= 3.0 * r.total_stderr);
  }
}

TEST_CASE("bias-variance is invariant to thread count") {
  const auto truth = [](double x) { return std::sin(3.0 * x); };
  BiasVarianceOptions opts;
  opts.trials = 64;
  opts.seed = 9;
  const auto a = bias_variance_decompose(truth, legendre_fitter(5), opts);
  opts.threads = 4;
  const auto b = bias_variance_decompose(truth, legendre_fitter(5), opts);
  CHECK(a.bias_sq == b.bias_sq);
  CHECK(a.variance == b.variance);
  CHECK(a.total == b.total);
}

TEST_CASE("bias-variance validates its options") {
  const auto truth = [](double) { return 0.0; };
  BiasVarianceOptions opts;
  opts.trials = 1;
  CHECK_THROWS_AS(bias_variance_decompose(truth, legendre_fitter(2), opts), InvalidInput);
  opts.trials = 10;
  opts.n = 0;
  CHECK_THROWS_AS(bias_variance_decompose(truth, legendre_fitter(2), opts), InvalidInput);
  opts.n = 5;
  const Fitter bad = [](const Vector&, const Vector&, const Vector&) { return Vector::Zero(2).eval(); };
  CHECK_THROWS_AS(bias_variance_decompose(truth, bad, opts), InvalidInput);
}
