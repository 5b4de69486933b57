#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <vector>

#include "lifi/channel.hpp"
#include "lifi/exact_stats.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace lifi;
using namespace lifi::testing;
using doctest::Approx;

TEST_CASE("incidence cosine by hand") {
  const Scenario s = Scenario::reference(MobilityMode::Stationary, 1.0, deg_to_rad(90.0));
  const LinkGeometry g(s);
  CHECK(incidence_cosine({0.0, 1.0, 2.0, 0.0}, g) == Approx(1.0).epsilon(1e-15));
  const double th = deg_to_rad(30.0);
  CHECK(incidence_cosine({1.0, 0.3, 0.3, th}, g) ==
        Approx((std::sin(th) + 1.5 * std::cos(th)) / std::sqrt(3.25)).epsilon(1e-14));
  CHECK(incidence_cosine({1.0, 0.3, 0.3 + kPi, th}, g) ==
        Approx((-std::sin(th) + 1.5 * std::cos(th)) / std::sqrt(3.25)).epsilon(1e-14));
  // Tilted sideways: the azimuth term vanishes.
  CHECK(incidence_cosine({1.0, 0.0, kPi / 2, th}, g) == Approx(1.5 * std::cos(th) / std::sqrt(3.25)).epsilon(1e-14));
}

TEST_CASE("peak gain directly below the AP") {
  for (const auto& c : kTableCases) {
    const Scenario s = c.scenario();
    CHECK(los_gain({0.0, 0.0, 0.0, 0.0}, s) == Approx(gain_bounds(s).h_max).epsilon(1e-14));
  }
}

TEST_CASE("field of view cut is strict") {
  Scenario s = Scenario::reference(MobilityMode::Stationary, 1.0, deg_to_rad(60.0));
  const LinkGeometry g(s);
  // Choose theta so that cos(psi) lands just either side of cos(FOV) at r = 0.
  CHECK(los_gain({0.0, 0.0, 0.0, deg_to_rad(59.999)}, g) > 0.0);
  CHECK(los_gain({0.0, 0.0, 0.0, deg_to_rad(60.001)}, g) == 0.0);
}

TEST_CASE("product and polynomial gain forms agree over 1e5 states") {
  const PropertyReport r = gain_form_equivalence(1000, 100, 77);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("state sampling follows the configured laws") {
  for (MobilityMode mode : {MobilityMode::Stationary, MobilityMode::Mobile}) {
    const Scenario s = Scenario::reference(mode, 2.5, deg_to_rad(90.0));
    const auto states = sample_states(s, 400'000, 12);
    const TruncatedRadial radial(radial_law(s), s.cell.attocell_radius);
    std::vector<double> r(states.size());
    long double theta_sum = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      r[i] = states[i].r;
      theta_sum += states[i].theta;
    }
    std::sort(r.begin(), r.end());
    double worst = 0.0;
    const double n = static_cast<double>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double f = radial.cdf(r[i]);
      worst = std::max({worst, std::abs((i + 1) / n - f), std::abs(f - i / n)});
    }
    CHECK(worst < 0.004);

    const OrientationLaw law = orientation_law(s);
    const double mean = gk_integral([&](double t) { return t * orientation_pdf(law, t); }, 0.0, kPi / 2);
    CHECK(std::abs(static_cast<double>(theta_sum / states.size()) - mean) < 5e-4);
  }
}

TEST_CASE("sampling is deterministic and worker-count invariant") {
  const Scenario s = Scenario::reference(MobilityMode::Mobile, 1.0, deg_to_rad(60.0));
  const auto a = sample_gains(s, 300'000, 4, 1);
  const auto b = sample_gains(s, 300'000, 4, 1);
  const auto c = sample_gains(s, 300'000, 4, 3);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.scenario_digest == scenario_digest(s));
  const auto d = sample_gains(s, 300'000, 5, 1);
  CHECK(d.gains != a.gains);
}

TEST_CASE("Monte Carlo outage agrees with the exact outage mass") {
  const Scenario s = Scenario::reference(MobilityMode::Stationary, 2.5, deg_to_rad(60.0));
  const auto set = sample_gains(s, 1'000'000, 8);
  const double p0 = outage_probability(s);
  const double se = std::sqrt(p0 * (1 - p0) / set.n_total);
  CHECK(std::abs(set.outage_frequency() - p0) < 4 * se);
  CHECK(p0 > 0.1);
}

TEST_CASE("samples stay on the gain support") {
  for (const auto& c : kTableCases) {
    const Scenario s = c.scenario();
    const auto gb = gain_bounds(s);
    const auto set = sample_gains(s, 100'000, 3);
    std::size_t zeros = 0;
    bool inside = true;
    for (double h : set.gains) {
      if (h == 0.0)
        ++zeros;
      else
        inside = inside && h >= gb.h_star_min * (1 - 1e-12) && h <= gb.h_max * (1 + 1e-12);
    }
    CHECK(inside);
    CHECK(zeros == set.n_outage);
    CHECK(set.gains.size() == set.n_total);
  }
}

TEST_CASE("empirical cdf steps") {
  const std::vector<double> v{3.0, 1.0, 2.0, 2.0};
  const EmpiricalCdf e(v);
  CHECK(e.cdf(0.5) == 0.0);
  CHECK(e.cdf(1.0) == 0.25);
  CHECK(e.cdf_left(2.0) == 0.25);
  CHECK(e.cdf(2.0) == 0.75);
  CHECK(e.cdf(2.5) == 0.75);
  CHECK(e.cdf(3.0) == 1.0);
  CHECK(e.cdf_left(3.0) == 0.75);
}
