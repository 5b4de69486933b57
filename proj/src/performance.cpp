#include "lifi/performance.hpp"

#include <cmath>
#include <numbers>

#include "lifi/parallel.hpp"

namespace lifi {

namespace {

void check_link(double p_opt, double sigma, int order) {
  if (!(p_opt >= 0) || !std::isfinite(p_opt)) throw DomainError("optical power must be finite and nonnegative");
  if (!(sigma > 0) || !std::isfinite(sigma)) throw DomainError("noise standard deviation must be positive");
  if (order < 2) throw DomainError("PAM order must be at least 2");
}

double ber_scale(int order) { return 2.0 * (order - 1.0) / order; }

// Argument scale a such that the instantaneous error is scale * Q(a h).
double q_slope(double p_opt, double sigma, int order) { return p_opt / (sigma * (order - 1.0)); }

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Gains z / a where Q(a h) bends; beyond 40 / a it is zero in double precision.
constexpr double kKnees[] = {0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 20.0};
constexpr double kTail = 40.0;

}  // namespace

std::vector<double> ksd_probes(double lo, double hi, int dense, std::span<const double> steps) {
  if (!(hi >= lo)) throw DomainError("probe range is empty");
  std::vector<double> out(steps.begin(), steps.end());
  for (int i = 0; i < dense; ++i) out.push_back(dense == 1 ? lo : lo + (hi - lo) * i / (dense - 1.0));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double pam_ber_instant(double h, double p_opt, double sigma, int order) {
  check_link(p_opt, sigma, order);
  return ber_scale(order) * q_function(h * q_slope(p_opt, sigma, order));
}

// Integration by parts against the CDF:
//   E[Pe] = K [Q(a hi) + p0 (Phi(a lo) - 1/2) + a int_lo^hi F(h) phi(a h) dh]
// which needs only F and stays accurate when phi(a h) is much narrower than
// the support.
double average_ber(const GainLaw& law, double p_opt, double sigma, int order, const QuadratureSpec& spec) {
  check_link(p_opt, sigma, order);
  const double k = ber_scale(order);
  const auto [lo, hi] = law.support();
  const double p0 = law.outage_mass();
  const double a = q_slope(p_opt, sigma, order);
  if (a == 0.0) return 0.5 * k;

  double value = q_function(a * hi) + p0 * (0.5 - q_function(a * lo));
  const double top = std::min(hi, kTail / a);
  if (top > lo) {
    std::vector<double> points;
    for (double h : law.nodes())
      if (h > lo && h < top) points.push_back(h);
    for (double z : kKnees) points.push_back(z / a);
    auto f = [&](double h) { return law.cdf(h) * std_normal_pdf(a * h); };
    const auto res = integrate_panels<double>(f, breakpoints(lo, top, points), spec);
    if (!res.converged) throw QuadratureError("average BER did not converge", res.error);
    value += a * res.value;
  }
  return std::clamp(k * value, 0.0, 0.5 * k);
}

double average_ber(const ExactGainLaw& law, double p_opt, double sigma, int order) {
  check_link(p_opt, sigma, order);
  const double k = ber_scale(order);
  const double a = q_slope(p_opt, sigma, order);
  if (a == 0.0) return 0.5 * k;
  std::vector<double> knots;
  for (double z : kKnees) knots.push_back(z / a);
  const QuadratureSpec spec{1e-8, 1e-15, 24};
  const double cont = law.expectation([a](double h) { return q_function(a * h); }, knots, spec);
  return std::clamp(k * (0.5 * law.outage() + cont), 0.0, 0.5 * k);
}

double ber_floor(double outage_mass, int order) {
  if (order < 2) throw DomainError("PAM order must be at least 2");
  return (order - 1.0) / order * outage_mass;
}

double ber_floor(const Scenario& s, int order, const QuadratureSpec& spec) {
  return ber_floor(outage_probability(s, spec), order);
}

BerCurve ber_curve(const GainLaw& law, std::span<const double> powers_dbm, double sigma, int order) {
  if (powers_dbm.empty()) throw DomainError("power sweep is empty");
  BerCurve curve{order, sigma, law.label(), {}, ber_floor(law.outage_mass(), order), {}};
  for (double dbm : powers_dbm) curve.points.push_back({dbm, average_ber(law, dbm_to_watts(dbm), sigma, order)});
  return curve;
}

BerCurve ber_curve(const ExactGainLaw& law, std::span<const double> powers_dbm, double sigma, int order) {
  if (powers_dbm.empty()) throw DomainError("power sweep is empty");
  BerCurve curve{order, sigma, "exact", scenario_digest(law.scenario()), ber_floor(law.outage(), order), {}};
  for (double dbm : powers_dbm) curve.points.push_back({dbm, average_ber(law, dbm_to_watts(dbm), sigma, order)});
  return curve;
}

std::vector<MonteCarloEstimate> montecarlo_ber(std::span<const double> gains, std::span<const double> powers_dbm,
                                               double sigma, int order, unsigned workers) {
  if (gains.empty()) throw DomainError("Monte Carlo BER needs at least one gain sample");
  std::vector<MonteCarloEstimate> out(powers_dbm.size());
  parallel_for(powers_dbm.size(), workers, [&](std::size_t j) {
    const double p = dbm_to_watts(powers_dbm[j]);
    check_link(p, sigma, order);
    const double k = ber_scale(order);
    const double a = q_slope(p, sigma, order);
    long double sum = 0, sum_sq = 0;
    for (double h : gains) {
      const double e = k * q_function(a * h);
      sum += e;
      sum_sq += static_cast<long double>(e) * e;
    }
    const auto n = static_cast<long double>(gains.size());
    const long double mean = sum / n;
    const long double var = gains.size() > 1 ? std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1)) : 0.0L;
    out[j] = {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)), gains.size()};
  });
  return out;
}

BerCurve montecarlo_ber_curve(const GainSampleSet& set, std::span<const double> powers_dbm, double sigma, int order,
                              unsigned workers) {
  if (powers_dbm.empty()) throw DomainError("power sweep is empty");
  BerCurve curve{order, sigma, "montecarlo", set.scenario_digest, ber_floor(set.outage_frequency(), order), {}};
  const auto est = montecarlo_ber(set.gains, powers_dbm, sigma, order, workers);
  for (std::size_t j = 0; j < est.size(); ++j) curve.points.push_back({powers_dbm[j], est[j].mean, est[j].std_error});
  return curve;
}

double multicell_gain(const UeState& st, const MulticellLayout& layout, const LinkGeometry& g) {
  const double xu = st.r * std::cos(st.alpha), yu = st.r * std::sin(st.alpha);
  const double co = std::cos(st.omega), so = std::sin(st.omega);
  const double ct = std::cos(st.theta), sn = std::sin(st.theta);
  double total = 0.0;
  for (const auto& [xa, ya] : layout.ap_positions()) {
    const double dx = xa - xu, dy = ya - yu;
    const double d = std::sqrt(dx * dx + dy * dy + g.dh * g.dh);
    const double along = g.dh * ct - (dx * co + dy * so) * sn;  // d cos(psi)
    if (!(along > g.cos_fov * d)) continue;
    total += g.c * along / std::pow(d, g.m + 3.0);
  }
  return total;
}

double multicell_gain(const UeState& state, const MulticellLayout& layout, const Scenario& s) {
  return multicell_gain(state, layout, LinkGeometry(s));
}

Scenario multicell_scenario(const Scenario& s, const MulticellLayout& layout) {
  if (!(layout.cell_radius > 0) || !(layout.spacing > 0)) throw DomainError("cell radius and spacing must be positive");
  Scenario out = s;
  out.cell.attocell_radius = layout.cell_radius;
  out.cell.outer_radius = std::max(s.cell.outer_radius, layout.cell_radius);
  validate(out);
  return out;
}

std::vector<double> sample_multicell_gains(const MulticellLayout& layout, const Scenario& s, std::size_t n,
                                           std::uint64_t seed, unsigned workers) {
  if (n == 0) throw DomainError("sample count must be positive");
  if (workers == 0) throw DomainError("worker count must be at least 1");
  const Scenario cell = multicell_scenario(s, layout);
  const StateSampler sampler(cell);
  const LinkGeometry geom(cell);
  std::vector<double> gains(n);
  for_each_chunk(n, workers, [&](std::size_t k, std::size_t begin, std::size_t end) {
    RandomStream stream = RandomStream::substream(seed, k);
    for (std::size_t i = begin; i < end; ++i) gains[i] = multicell_gain(sampler(stream), layout, geom);
  });
  return gains;
}

MonteCarloEstimate multicell_ber(const MulticellLayout& layout, const Scenario& s, double p_opt_dbm, double sigma,
                                 int order, std::size_t n, std::uint64_t seed, unsigned workers) {
  const auto gains = sample_multicell_gains(layout, s, n, seed, workers);
  const double power[] = {p_opt_dbm};
  return montecarlo_ber(gains, power, sigma, order, 1).front();
}

}  // namespace lifi
