#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "lifi/distributions.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace lifi;
using namespace lifi::testing;
using doctest::Approx;

namespace {

// Two-sided KSD of a sample against a CDF.
template <typename Cdf>
double sample_ksd(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    worst = std::max({worst, std::abs((i + 1) / n - f), std::abs(f - i / n)});
  }
  return worst;
}

}  // namespace

TEST_CASE("normal cdf and quantile against Boost.Math") {
  const boost::math::normal_distribution<double> ref;
  for (double z = -30; z <= 8; z += 0.37) CHECK(relative(normal_cdf(z), boost::math::cdf(ref, z)) < 1e-13);
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-12})
    CHECK(relative(normal_quantile(p), boost::math::quantile(ref, p)) < 1e-12);
}

TEST_CASE("truncated Laplace peak matches the normalized closed form") {
  const double mu = deg_to_rad(41.39), sigma = deg_to_rad(7.68);
  const TruncatedLaplace law(mu, sigma);
  const double b = sigma / std::sqrt(2.0);
  // Mass of the untruncated Laplace law on [0, pi/2].
  const double z = 1.0 - 0.5 * std::exp(-(kPi / 2 - mu) / b) - 0.5 * std::exp(-mu / b);
  CHECK(law.mass() == Approx(z).epsilon(1e-14));
  CHECK(law.pdf(mu) == Approx(1.0 / (std::sqrt(2.0) * sigma * z)).epsilon(1e-14));
  CHECK(law.pdf(-0.1) == 0.0);
  CHECK(gk_integral([&](double x) { return law.pdf(x); }, 0, mu) +
            gk_integral([&](double x) { return law.pdf(x); }, mu, kPi / 2) ==
        Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated Gaussian sampling mean") {
  const double mu = deg_to_rad(29.67), sigma = deg_to_rad(7.78);
  const TruncatedGaussian law(mu, sigma);
  const boost::math::normal_distribution<double> ref;
  const double a = (0 - mu) / sigma, b = (kPi / 2 - mu) / sigma;
  const double z = boost::math::cdf(ref, b) - boost::math::cdf(ref, a);
  const double mean = mu + sigma * (boost::math::pdf(ref, a) - boost::math::pdf(ref, b)) / z;
  const double var = sigma * sigma *
                     (1 + (a * boost::math::pdf(ref, a) - b * boost::math::pdf(ref, b)) / z -
                      std::pow((boost::math::pdf(ref, a) - boost::math::pdf(ref, b)) / z, 2));
  RandomStream rng(42);
  const OrientationLaw ol = law;
  const int n = 1'000'000;
  std::vector<double> xs(n);
  long double sum = 0;
  for (auto& x : xs) sum += (x = orientation_sample(ol, rng));
  const double se = std::sqrt(var / n);
  CHECK(std::abs(static_cast<double>(sum / n) - mean) < 3 * se);
  CHECK(sample_ksd(xs, [&](double x) { return law.cdf(x); }) < 0.002);
}

TEST_CASE("truncated Gaussian deep in a tail stays normalized") {
  // The window sits 41 to 52 sigma below mu, where erfc underflows.
  for (const TruncatedGaussian& law : {TruncatedGaussian(1.7484195441744064, 0.025581703989814287, 0.41849613985613049,
                                                         0.69057287838781289),
                                       TruncatedGaussian(-0.6, 0.012, 0.1, 0.5)}) {
    const double lo = law.lo(), hi = law.hi();
    CHECK(std::isfinite(law.mass()));
    CHECK(law.mass() > 0);
    const double mid = 0.5 * (lo + hi);
    const double total = gk_integral([&](double x) { return law.pdf(x); }, lo, mid) +
                         gk_integral([&](double x) { return law.pdf(x); }, mid, hi);
    CHECK(total == Approx(1.0).epsilon(1e-10));
    for (double p : {1e-6, 0.1, 0.5, 0.9, 1 - 1e-6}) CHECK(law.cdf(law.quantile(p)) == Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("degenerate spread concentrates at the mean") {
  const OrientationLaw g = TruncatedGaussian(0.7, 1e-9);
  const OrientationLaw l = TruncatedLaplace(0.7, 1e-9);
  RandomStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(std::abs(orientation_sample(g, rng) - 0.7) < 1e-7);
    CHECK(std::abs(orientation_sample(l, rng) - 0.7) < 1e-7);
  }
}

TEST_CASE("inverse-CDF sampling is uniform in probability") {
  CHECK(sampling_uniformity(MobilityMode::Stationary, 1'000'000, 17) < 0.002);
  CHECK(sampling_uniformity(MobilityMode::Mobile, 1'000'000, 18) < 0.002);
}

TEST_CASE("radial laws") {
  const RadialLaw uni = RadialLaw::uniform_disk(3.0);
  for (double r : {0.0, 0.3, 1.1, 2.0}) CHECK(radial_truncated_pdf(uni, 2.0, r) == Approx(2 * r / 4.0).epsilon(1e-14));
  CHECK(radial_truncated_pdf(uni, 2.0, 2.5) == 0.0);

  const RadialLaw rwp = RadialLaw::rwp(2.5);
  double raw_mass = 0.0;
  for (std::size_t i = 0; i < 3; ++i) raw_mass += RadialLaw::kRwpCoeffs[i] / (RadialLaw::kRwpPowers[i] + 1);
  CHECK(raw_mass == Approx(73.0 / 75.0).epsilon(1e-15));
  CHECK(gk_integral([&](double r) { return rwp.pdf(r); }, 0, 2.5) == Approx(73.0 / 75.0).epsilon(1e-13));
  for (double r : {0.1, 1.0, 2.4}) CHECK(radial_truncated_pdf(rwp, 2.5, r) == Approx(rwp.pdf(r) * 75.0 / 73.0).epsilon(1e-13));
}

TEST_CASE("distance law") {
  const Scenario s = Scenario::reference(MobilityMode::Stationary, 1.0, deg_to_rad(90.0));
  const auto db = distance_bounds(s);
  for (double d : {db.min, 1.6, 1.7, db.max}) CHECK(distance_pdf(s, d) == Approx(2 * d / 1.0).epsilon(1e-12));
  CHECK(distance_pdf(s, db.min - 1e-9) == 0.0);
  CHECK(distance_pdf(s, db.max + 1e-9) == 0.0);
  for (const auto& c : kTableCases) {
    const Scenario t = c.scenario();
    const auto b = distance_bounds(t);
    CHECK(gk_integral([&](double d) { return distance_pdf(t, d); }, b.min, b.max) == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("arcsine law") {
  const auto mid = arcsine_pdf_cdf(0.0);
  CHECK(mid.density == Approx(1 / kPi).epsilon(1e-15));
  CHECK(mid.probability == 0.5);
  const auto out = arcsine_pdf_cdf(1.5);
  CHECK(out.density == 0.0);
  CHECK(out.probability == 1.0);
  CHECK(arcsine_cdf(-1.5) == 0.0);
  CHECK(arcsine_pdf(1.0) == kArcsineEdgeDensity);

  RandomStream rng(9);
  std::vector<double> xs(1'000'000);
  for (auto& x : xs) x = std::cos(rng.angle() - rng.angle());
  CHECK(sample_ksd(xs, arcsine_cdf) < 0.002);
}

TEST_CASE("randomized distribution properties") {
  const PropertyReport report = distribution_properties(1000, 2024);
  INFO(report.first_failure);
  CHECK(report.cases == 1000);
  CHECK(report.ok());
}
