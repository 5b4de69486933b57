#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include <Eigen/Core>

#include "lifi/gain_law.hpp"
#include "lifi/quadrature.hpp"
#include "lifi/random.hpp"
#include "lifi/simplex.hpp"
#include "support.hpp"

using namespace lifi;
using namespace lifi::testing;
using doctest::Approx;

TEST_CASE("adaptive Gauss-Kronrod against Boost") {
  const QuadratureSpec spec{1e-12, 1e-300, 30};
  auto f = [](double x) { return std::exp(-x) * std::sin(7 * x) / (1 + x * x); };
  CHECK(integrate(f, 0, 5, spec).value == Approx(gk_integral(f, 0, 5)).epsilon(1e-11));
  auto peak = [](double x) { return 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)); };
  const auto r = integrate(peak, 0, 1, spec);
  CHECK(r.converged);
  CHECK(r.value == Approx(100 * (std::atan(70.0) + std::atan(30.0))).epsilon(1e-10));
}

TEST_CASE("array-valued integrands share panels") {
  auto f = [](double x) {
    Eigen::ArrayXd v(3);
    v << 1.0, x, x * x;
    return v;
  };
  const auto r = integrate_panels<Eigen::ArrayXd>(f, breakpoints(0, 2, {0.5, 1.7, 9.0}), {});
  CHECK(r.value(0) == Approx(2.0).epsilon(1e-14));
  CHECK(r.value(1) == Approx(2.0).epsilon(1e-14));
  CHECK(r.value(2) == Approx(8.0 / 3).epsilon(1e-14));
}

TEST_CASE("breakpoints drop points outside the interval") {
  const auto e = breakpoints(0, 1, {1.5, 0.5, -1.0, 0.25, std::nan("")});
  CHECK(e == std::vector<double>{0, 0.25, 0.5, 1});
}

TEST_CASE("piece maps handle end point singularities") {
  const QuadratureSpec spec{1e-11, 1e-300, 30};
  auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(std::max(1e-300, x * (1 - x))); };
  CHECK(integrate_pieces<double>(inv_sqrt, {{0, 1, PieceMap::Sine}}, spec).value == Approx(kPi).epsilon(1e-9));
  CHECK(integrate_sine_mapped<double>(inv_sqrt, 0, 1, spec).value == Approx(kPi).epsilon(1e-9));
  auto logx = [](double x) { return std::log(std::max(x, 1e-300)); };
  CHECK(integrate_pieces<double>(logx, {{0, 1, PieceMap::PowerLeft}}, spec).value == Approx(-1.0).epsilon(1e-9));
  auto log1x = [](double x) { return std::log(std::max(1 - x, 1e-300)); };
  CHECK(integrate_pieces<double>(log1x, {{0, 1, PieceMap::PowerRight}}, spec).value == Approx(-1.0).epsilon(1e-9));
  auto recip = [](double x) { return 1.0 / x; };
  CHECK(integrate_pieces<double>(recip, {{1e-6, 1, PieceMap::Log}, {1, 2, PieceMap::Linear}}, spec).value ==
        Approx(std::log(2e6)).epsilon(1e-10));
}

TEST_CASE("Nelder-Mead minimizes Rosenbrock") {
  auto rosen = [](const Eigen::VectorXd& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
  Eigen::VectorXd start(2);
  start << -1.2, 1.0;
  const auto r = nelder_mead(rosen, start, {0.5, 1e-18, 1e-12, 20000, 3});
  CHECK(r.x(0) == Approx(1.0).epsilon(1e-6));
  CHECK(r.x(1) == Approx(1.0).epsilon(1e-6));
  CHECK(r.value < 1e-12);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("Nelder-Mead treats non-finite values as infinite") {
  auto f = [](const Eigen::VectorXd& x) { return x(0) < 0 ? std::nan("") : (x(0) - 2) * (x(0) - 2); };
  Eigen::VectorXd start(1);
  start << 0.1;
  CHECK(nelder_mead(f, start).x(0) == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("monotone cubic interpolation") {
  RandomStream rng(1);
  std::vector<double> x{0}, y{0};
  for (int i = 1; i < 40; ++i) {
    x.push_back(x.back() + 0.01 + rng.uniform());
    y.push_back(y.back() + (i % 7 == 0 ? 0.0 : rng.uniform()));
  }
  const MonotoneCubic c(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(c(x[i]) == Approx(y[i]).epsilon(1e-14));
  double prev = -1;
  for (double t = x.front(); t <= x.back(); t += (x.back() - x.front()) / 5000) {
    CHECK(c(t) >= prev - 1e-14);
    prev = c(t);
  }
  // Cubic data are reproduced exactly by the Hermite form with true slopes.
  std::vector<double> xs, ys, ds;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    xs.push_back(t);
    ys.push_back(t * t * t);
    ds.push_back(3 * t * t);
  }
  const MonotoneCubic h(xs, ys, ds);
  CHECK(h(0.537) == Approx(std::pow(0.537, 3)).epsilon(1e-13));
}

TEST_CASE("gain law from a known density") {
  // Continuous part 0.7 * 2h on [0, 1] plus an atom 0.3 at zero.
  std::vector<double> nodes = clustered_nodes(0, 1, 65), pdf, cdf;
  CHECK(nodes.front() == 0.0);
  CHECK(nodes.back() == 1.0);
  for (double h : nodes) {
    pdf.push_back(1.4 * h);
    cdf.push_back(0.3 + 0.7 * h * h);
  }
  const GainLaw law(0.3, {0, 1}, GainLaw::Provenance::Exact, "exact", nodes, pdf, cdf);
  CHECK(law.cdf(-1e-9) == 0.0);
  CHECK(law.cdf_left(0.0) == 0.0);
  CHECK(law.cdf(0.0) == Approx(0.3));
  CHECK(law.cdf(0.4321) == Approx(0.3 + 0.7 * 0.4321 * 0.4321).epsilon(1e-12));
  CHECK(law.density(0.4321) == Approx(1.4 * 0.4321).epsilon(1e-12));
  CHECK(law.cdf(2.0) == 1.0);
  CHECK(law.density(1.5) == 0.0);
  CHECK(law.label() == "exact");
}
