#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "lifi/channel.hpp"
#include "lifi/exact_stats.hpp"
#include "support.hpp"

using namespace lifi;
using namespace lifi::testing;
using doctest::Approx;

namespace {

double table_normalization(const ExactGainLaw& law) {
  const auto keys = law.key_gains();
  double total = law.outage();
  for (std::size_t k = 0; k + 1 < keys.size(); ++k)
    total += ts_integral([&](double h) { return law.pdf(h); }, keys[k], keys[k + 1], 1e-6);
  return total;
}

}  // namespace

TEST_CASE("degenerate user: upright and under the AP") {
  Scenario s = Scenario::reference(MobilityMode::Mobile, 1e-4, deg_to_rad(60.0));
  s.orientation = {0.0, 1e-4};
  const ExactGainLaw law(s);
  CHECK(law.outage() == 0.0);
  CHECK(exact_moments(s, 1) == Approx(gain_bounds(s).h_max).epsilon(1e-4));
}

TEST_CASE("continuous part and atom sum to one") {
  const ExactGainLaw law(Scenario::reference(MobilityMode::Mobile, 1.0, deg_to_rad(60.0)));
  CHECK(table_normalization(law) == Approx(1.0).epsilon(1e-6));
  CHECK(law.normalized_moments(0)(0) == Approx(1.0 - law.outage()).epsilon(1e-8));
  CHECK(law.expectation([](double) { return 1.0; }, {}, {}) == Approx(1.0 - law.outage()).epsilon(1e-8));
}

TEST_CASE("moving lower distance limit adds nothing") {
  for (const auto& c : kTableCases) {
    if (c.fov_deg == 90.0) continue;
    const ExactGainLaw law(c.scenario());
    for (double f : {0.05, 0.2, 0.35, 0.6}) {
      const double h = f * law.support_hi();
      CHECK(std::abs(law.boundary_term(h)) * law.support_hi() < 1e-12);
      CHECK(law.pdf(h, {false}) == Approx(law.pdf(h, {true})).epsilon(1e-12));
    }
  }
}

TEST_CASE("cdf derivative matches the density") {
  for (const auto& c : kTableCases) {
    const ExactGainLaw law(c.scenario());
    const double hmax = law.support_hi();
    const auto keys = law.key_gains();
    const double step = 1e-3 * hmax;
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double h = f * hmax;
      bool near_key = false;
      for (double k : keys) near_key = near_key || std::abs(h - k) < 5 * step;
      if (near_key || h - step < law.support_lo()) continue;
      const double fd = (law.cdf(h + step) - law.cdf(h - step)) / (2 * step);
      INFO(c.name(), " h/hmax=", f);
      CHECK(fd * hmax == Approx(law.pdf(h) * hmax).epsilon(1e-4));
    }
  }
}

TEST_CASE("cdf end values and monotonicity") {
  for (const auto& c : kTableCases) {
    const ExactGainLaw law(c.scenario());
    CHECK(law.cdf(-1e-12) == 0.0);
    CHECK(law.cdf(0.0) == Approx(law.outage()).epsilon(1e-12));
    if (law.support_lo() > 0) CHECK(law.cdf(0.5 * law.support_lo()) == Approx(law.outage()).epsilon(1e-12));
    CHECK(law.cdf(law.support_hi()) == 1.0);
    double prev = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double v = law.cdf(law.support_hi() * k / 40.0);
      CHECK(v >= prev - 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("moments against Monte Carlo and Jensen") {
  for (const auto& c : kTableCases) {
    const Scenario s = c.scenario();
    const ExactGainLaw law(s);
    const auto nm = law.normalized_moments(2);
    const double hmax = law.support_hi();
    const double m1 = nm(1) * hmax, m2 = nm(2) * hmax * hmax;
    CHECK(m1 == Approx(exact_moments(s, 1)).epsilon(1e-12));
    CHECK(m1 == Approx(law.expectation([](double h) { return h; }, {}, {})).epsilon(1e-7));
    CHECK(m2 >= m1 * m1 / (1 - law.outage()));

    const auto set = sample_gains(s, 1'000'000, 31);
    long double sum = 0, sq = 0;
    for (double h : set.gains) {
      sum += h;
      sq += static_cast<long double>(h) * h;
    }
    const double n = static_cast<double>(set.gains.size());
    const double mean = static_cast<double>(sum / n);
    const double se = std::sqrt(static_cast<double>(sq / n) - mean * mean) / std::sqrt(n);
    INFO(c.name());
    CHECK(std::abs(mean - m1) < 4 * se);
  }
}

TEST_CASE("tabulated law reproduces the exact law") {
  const ExactGainLaw law(Scenario::reference(MobilityMode::Stationary, 1.0, deg_to_rad(60.0)));
  const GainLaw table = tabulate_law(law, 512, 2);
  CHECK(table.outage_mass() == law.outage());
  CHECK(table.label() == "exact");
  const auto& nodes = table.nodes();
  for (std::size_t i = 0; i < nodes.size(); i += 37) {
    CHECK(table.density(nodes[i]) == Approx(law.pdf(nodes[i])).epsilon(1e-12));
    CHECK(table.cdf(nodes[i]) == Approx(law.cdf(nodes[i])).epsilon(1e-9));
  }
  const double hmax = law.support_hi();
  const auto keys = law.key_gains();
  for (std::size_t i = 5; i + 5 < nodes.size(); i += 23) {
    const double h = 0.5 * (nodes[i] + nodes[i + 1]);
    bool near_key = false;
    for (double k : keys) near_key = near_key || std::abs(h - k) < 5e-3 * hmax;
    CHECK(std::abs(table.cdf(h) - law.cdf(h)) < 1e-4);
    if (near_key) continue;
    const double f = law.pdf(h);
    if (f * hmax < 1e-2) continue;
    INFO("h/hmax=", h / hmax);
    CHECK(std::abs(table.density(h) - f) < 1e-3 * f);
  }
}

TEST_CASE("invalid tolerances are rejected") {
  const Scenario s = Scenario::reference(MobilityMode::Mobile, 1.0, deg_to_rad(60.0));
  CHECK_THROWS_AS(ExactGainLaw(s, {0.0, 1e-14, 20}), DomainError);
  CHECK_THROWS_AS(exact_moments(s, 0), DomainError);
}
