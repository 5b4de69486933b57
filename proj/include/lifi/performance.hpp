#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <numbers>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lifi/channel.hpp"
#include "lifi/exact_stats.hpp"
#include "lifi/gain_law.hpp"
#include "lifi/quadrature.hpp"
#include "lifi/scenario.hpp"

namespace lifi {

/// Anything with right-continuous cdf(x) and its left limit cdf_left(x).
template <typename T>
concept CdfLike = requires(const T& t, double x) {
  { t.cdf(x) } -> std::convertible_to<double>;
  { t.cdf_left(x) } -> std::convertible_to<double>;
};

/// Kolmogorov-Smirnov distance: the largest gap between two CDFs over the
/// probes, checked on both sides of each probe so that jumps are caught.
template <CdfLike A, CdfLike B>
double ksd(const A& a, const B& b, std::span<const double> probes) {
  double worst = 0.0;
  for (double x : probes) {
    worst = std::max(worst, std::abs(a.cdf(x) - b.cdf(x)));
    worst = std::max(worst, std::abs(a.cdf_left(x) - b.cdf_left(x)));
  }
  return std::min(worst, 1.0);
}

/// Probe set for ksd: `dense` evenly spaced points on [lo, hi] merged with the
/// given step locations.
std::vector<double> ksd_probes(double lo, double hi, int dense, std::span<const double> steps = {});

/// Point mass at `at`; a degenerate CDF for tests and baselines.
struct PointMass {
  double at;
  double cdf(double x) const { return x >= at ? 1.0 : 0.0; }
  double cdf_left(double x) const { return x > at ? 1.0 : 0.0; }
};

/// Gaussian tail probability.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

/// Error probability of M-PAM at gain h: (2(M-1)/M) Q(h P / (sigma (M-1))).
double pam_ber_instant(double h, double p_opt, double sigma, int order);

/// Average error probability over a tabulated gain law.
double average_ber(const GainLaw& law, double p_opt, double sigma, int order, const QuadratureSpec& spec = {});
/// Average error probability over the exact law, integrated directly over the
/// user state rather than through a density table.
double average_ber(const ExactGainLaw& law, double p_opt, double sigma, int order);

/// High-power limit ((M - 1)/M) p0.
double ber_floor(double outage_mass, int order);
double ber_floor(const Scenario& s, int order, const QuadratureSpec& spec = {});

struct BerPoint {
  double p_opt_dbm;
  double ber;
  /// Standard error for Monte Carlo points, zero for quadrature.
  double std_error = 0.0;
};

struct BerCurve {
  int order = 2;
  double noise_sigma = 0.0;
  std::string source;
  std::string scenario_digest;
  double floor = 0.0;
  std::vector<BerPoint> points;
};

BerCurve ber_curve(const GainLaw& law, std::span<const double> powers_dbm, double sigma, int order);
BerCurve ber_curve(const ExactGainLaw& law, std::span<const double> powers_dbm, double sigma, int order);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;

  bool operator==(const MonteCarloEstimate&) const = default;
};

/// Sample average of pam_ber_instant over a gain sample, one entry per power.
/// Powers are spread over `workers` threads; the sum over gains is sequential.
std::vector<MonteCarloEstimate> montecarlo_ber(std::span<const double> gains, std::span<const double> powers_dbm,
                                               double sigma, int order, unsigned workers = 1);
BerCurve montecarlo_ber_curve(const GainSampleSet& set, std::span<const double> powers_dbm, double sigma, int order,
                              unsigned workers = 1);

/// Five access points: one above the origin and four at distance D_c along
/// the axes. Users are drawn within the reference cell of radius R_c.
struct MulticellLayout {
  double cell_radius;
  double spacing;

  std::array<std::pair<double, double>, 5> ap_positions() const {
    return {{{0.0, 0.0}, {spacing, 0.0}, {-spacing, 0.0}, {0.0, spacing}, {0.0, -spacing}}};
  }
};

/// Sum of the LOS gains from all five APs, each with its own FOV test, for
/// one user state (position relative to the central AP, shared orientation).
double multicell_gain(const UeState& state, const MulticellLayout& layout, const LinkGeometry& geom);
double multicell_gain(const UeState& state, const MulticellLayout& layout, const Scenario& s);

/// Scenario used to draw users in the reference cell: attocell radius R_c and
/// an outer radius large enough to contain it.
Scenario multicell_scenario(const Scenario& s, const MulticellLayout& layout);

std::vector<double> sample_multicell_gains(const MulticellLayout& layout, const Scenario& s, std::size_t n,
                                           std::uint64_t seed, unsigned workers = 1);

MonteCarloEstimate multicell_ber(const MulticellLayout& layout, const Scenario& s, double p_opt_dbm, double sigma,
                                 int order, std::size_t n, std::uint64_t seed, unsigned workers = 1);

}  // namespace lifi
