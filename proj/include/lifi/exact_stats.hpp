#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "lifi/distributions.hpp"
#include "lifi/gain_law.hpp"
#include "lifi/quadrature.hpp"
#include "lifi/scenario.hpp"

namespace lifi {

struct PdfOptions {
  /// Include the Leibniz term from the moving lower distance limit. It is
  /// identically zero analytically; the switch exists so tests can show that.
  bool boundary_term = true;
};

/// Exact law of the LOS gain of one scenario, evaluated by nested adaptive
/// quadrature over distance d and elevation theta. The azimuth difference is
/// integrated analytically through the arcsine law.
class ExactGainLaw {
 public:
  explicit ExactGainLaw(const Scenario& s, QuadratureSpec spec = {});

  /// P(cos psi <= t | d).
  double conditional_cos_cdf(double d, double t) const;
  /// Conditional density of the gain given d, at h (zero outside the FOV branch).
  double conditional_density(double h, double d) const;

  /// Mass of the atom at zero.
  double outage() const;
  /// Continuous part of the density at h.
  double pdf(double h, PdfOptions options = {}) const;
  /// The Leibniz boundary contribution alone.
  double boundary_term(double h) const;
  /// P(H <= h), including the atom.
  double cdf(double h) const;
  /// E[(H/h_max)^i 1(H > 0)] for i = 0..max_order. Entry 0 is 1 - p0.
  Eigen::ArrayXd normalized_moments(int max_order) const;
  /// E[g(H) 1(H > 0)] integrated over distance, elevation and azimuth. `knots`
  /// are gains near which g varies quickly; they become azimuth breakpoints.
  double expectation(const std::function<double(double)>& g, std::span<const double> knots,
                     const QuadratureSpec& spec) const;

  const Scenario& scenario() const { return scenario_; }
  const LinkGeometry& geometry() const { return geom_; }
  const QuadratureSpec& spec() const { return spec_; }
  /// Lower end of the continuous support (h*_min).
  double support_lo() const { return bounds_.h_star_min; }
  double support_hi() const { return bounds_.h_max; }
  /// Gains where the density has kinks or steep sections, sorted, inside the support.
  std::vector<double> key_gains() const;

 private:
  template <typename Value, typename F>
  Value integrate_theta(F&& f, double lo, double hi, std::vector<double> points, bool log_zone) const;
  double distance_lower(double h) const;
  double distance_upper(double h) const;

  Scenario scenario_;
  LinkGeometry geom_;
  GainBounds bounds_;
  DistanceLaw distance_;
  OrientationLaw orientation_;
  QuadratureSpec spec_;
  QuadratureSpec inner_spec_;
  double theta_mu_;
  double p0_ = 0.0;
};

double outage_probability(const Scenario& s, const QuadratureSpec& spec = {});
double exact_pdf(const Scenario& s, double h, const QuadratureSpec& spec = {}, PdfOptions options = {});
double exact_cdf(const Scenario& s, double h, const QuadratureSpec& spec = {});
/// i-th raw moment of the gain, i >= 1. The atom at zero contributes nothing.
double exact_moments(const Scenario& s, int i, const QuadratureSpec& spec = {});

/// Tabulates pdf and cdf on a node grid clustered around the key gains and
/// returns the interpolated law. Node evaluations run on `workers` threads.
GainLaw tabulate_law(const ExactGainLaw& law, int grid_size, unsigned workers = 1);
GainLaw tabulate_law(const Scenario& s, int grid_size, const QuadratureSpec& spec = {},
                     unsigned workers = 1);

}  // namespace lifi
