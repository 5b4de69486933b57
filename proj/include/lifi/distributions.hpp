#pragma once

#include <array>
#include <limits>
#include <variant>

#include "lifi/random.hpp"
#include "lifi/scenario.hpp"

namespace lifi {

/// Standard normal CDF and its inverse (relative error well below 1e-12 after
/// the Halley refinement step).
double normal_cdf(double z);
double normal_quantile(double p);

/// Laplace law with location `mu` and standard deviation `sigma` (scale
/// sigma/sqrt(2)), restricted to [lo, hi] and renormalized.
class TruncatedLaplace {
 public:
  TruncatedLaplace(double mu, double sigma, double lo = 0.0, double hi = kPi / 2);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Probability mass the untruncated law puts on [lo, hi].
  double mass() const { return mass_; }

 private:
  double raw_cdf(double x) const;

  double mu_, sigma_, lo_, hi_, scale_, cdf_lo_, mass_;
  bool upper_tail_;  // work with survival probabilities when the window sits right of mu
};

/// Gaussian law restricted to [lo, hi] and renormalized.
class TruncatedGaussian {
 public:
  TruncatedGaussian(double mu, double sigma, double lo = 0.0, double hi = kPi / 2);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mass() const { return mass_; }

 private:
  double scaled_tail(double t) const;

  double mu_, sigma_, lo_, hi_;
  double z_lo_, z_hi_, mass_;
  double t_near_, t_far_ = 0.0;  // window ends measured into the tail, near one first
  bool upper_tail_;  // work with survival probabilities when the window sits right of mu
  bool deep_;        // masses scaled by phi(t_near) to avoid underflow
};

using OrientationLaw = std::variant<TruncatedLaplace, TruncatedGaussian>;

OrientationLaw orientation_law(const Scenario& s);
double orientation_pdf(const OrientationLaw& law, double theta);
double orientation_cdf(const OrientationLaw& law, double theta);
double orientation_sample(const OrientationLaw& law, RandomStream& stream);

/// Stationary polar-distance law of the user inside the outer disk of radius
/// R_e: uniform over the disk, or the random-waypoint polynomial.
class RadialLaw {
 public:
  enum class Kind { UniformDisk, Rwp };

  static RadialLaw uniform_disk(double outer_radius) { return {Kind::UniformDisk, outer_radius}; }
  static RadialLaw rwp(double outer_radius) { return {Kind::Rwp, outer_radius}; }

  Kind kind() const { return kind_; }
  double outer_radius() const { return outer_; }

  /// Unnormalized density as printed; the waypoint polynomial carries total
  /// mass 73/75 over [0, R_e].
  double pdf(double r) const;
  double cdf(double r) const;
  /// pdf(r) / r, finite at r = 0.
  double pdf_over_r(double r) const;

  static constexpr std::array<double, 3> kRwpCoeffs = {324.0 / 75.0, -420.0 / 75.0, 96.0 / 75.0};
  static constexpr std::array<int, 3> kRwpPowers = {1, 3, 5};

 private:
  RadialLaw(Kind kind, double outer) : kind_(kind), outer_(outer) {}

  Kind kind_;
  double outer_;
};

RadialLaw radial_law(const Scenario& s);

/// A radial law restricted to the attocell [0, R] and renormalized.
class TruncatedRadial {
 public:
  TruncatedRadial(RadialLaw law, double radius);

  double pdf(double r) const;
  double cdf(double r) const;
  double pdf_over_r(double r) const;
  double quantile(double p) const;

  double radius() const { return radius_; }
  const RadialLaw& law() const { return law_; }

 private:
  RadialLaw law_;
  double radius_;
  double mass_;
};

double radial_truncated_pdf(const RadialLaw& law, double radius, double r);

/// Density of the AP-to-UE distance d = sqrt(r^2 + (h_a - h_u)^2).
double distance_pdf(const Scenario& s, double d);

/// Distance law bound to one scenario; cheaper than distance_pdf in loops.
class DistanceLaw {
 public:
  explicit DistanceLaw(const Scenario& s);
  double pdf(double d) const;
  double d_min() const { return d_min_; }
  double d_max() const { return d_max_; }

 private:
  TruncatedRadial radial_;
  double dh_, d_min_, d_max_;
};

/// Arcsine law of cos(Omega - alpha) on [-1, 1]. The density at |x| = 1 is
/// reported as +infinity; quadrature never evaluates it there.
inline constexpr double kArcsineEdgeDensity = std::numeric_limits<double>::infinity();
double arcsine_pdf(double x);
double arcsine_cdf(double x);

struct ArcsineValues {
  double density;
  double probability;
};
inline ArcsineValues arcsine_pdf_cdf(double x) { return {arcsine_pdf(x), arcsine_cdf(x)}; }

}  // namespace lifi
