#include "lifi/distributions.hpp"

#include <algorithm>
#include <cmath>

namespace lifi {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double normal_survival(double z) { return 0.5 * std::erfc(z / kSqrt2); }

// Mills ratio P(Z > t) / phi(t) by its continued fraction; accurate for t >= 30.
double mills_ratio(double t) {
  double f = t;
  for (int k = 40; k >= 1; --k) f = t + k / f;
  return 1.0 / f;
}

// Windows deeper than this in one tail underflow erfc and use scaled tails.
constexpr double kDeepTail = 30.0;

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
  if (!(p < 1.0)) return std::numeric_limits<double>::infinity();

  // Acklam's rational approximation, then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Refine on whichever tail keeps the residual well conditioned.
  const double e = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_survival(x);
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

TruncatedLaplace::TruncatedLaplace(double mu, double sigma, double lo, double hi)
    : mu_(mu), sigma_(sigma), lo_(lo), hi_(hi), scale_(sigma / kSqrt2) {
  if (!(sigma > 0) || !(lo < hi)) throw DomainError("truncated Laplace needs sigma > 0 and lo < hi");
  upper_tail_ = lo_ > mu_;
  cdf_lo_ = raw_cdf(lo_);
  mass_ = upper_tail_ ? cdf_lo_ - raw_cdf(hi_) : raw_cdf(hi_) - cdf_lo_;
}

// P(X <= x) of the untruncated law, or P(X > x) when the window sits right of mu.
double TruncatedLaplace::raw_cdf(double x) const {
  const double z = (x - mu_) / scale_;
  if (upper_tail_) return 0.5 * std::exp(-z);
  return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double TruncatedLaplace::pdf(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  return std::exp(-std::abs(x - mu_) / scale_) / (2.0 * scale_ * mass_);
}

double TruncatedLaplace::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  const double v = upper_tail_ ? (cdf_lo_ - raw_cdf(x)) / mass_ : (raw_cdf(x) - cdf_lo_) / mass_;
  return std::clamp(v, 0.0, 1.0);
}

double TruncatedLaplace::quantile(double p) const {
  double x;
  if (upper_tail_) {
    x = mu_ - scale_ * std::log(2.0 * (cdf_lo_ - p * mass_));
  } else {
    const double target = cdf_lo_ + p * mass_;
    x = target < 0.5 ? mu_ + scale_ * std::log(2.0 * target) : mu_ - scale_ * std::log(2.0 * (1.0 - target));
  }
  return std::clamp(x, lo_, hi_);
}

TruncatedGaussian::TruncatedGaussian(double mu, double sigma, double lo, double hi)
    : mu_(mu), sigma_(sigma), lo_(lo), hi_(hi) {
  if (!(sigma > 0) || !(lo < hi)) throw DomainError("truncated Gaussian needs sigma > 0 and lo < hi");
  z_lo_ = (lo - mu) / sigma;
  z_hi_ = (hi - mu) / sigma;
  upper_tail_ = z_lo_ > 0;
  t_near_ = upper_tail_ ? z_lo_ : -z_hi_;
  deep_ = t_near_ > kDeepTail;
  if (deep_) {
    t_far_ = upper_tail_ ? z_hi_ : -z_lo_;
    mass_ = scaled_tail(t_near_) - scaled_tail(t_far_);
  } else {
    mass_ = upper_tail_ ? normal_survival(z_lo_) - normal_survival(z_hi_)
                        : normal_cdf(z_hi_) - normal_cdf(z_lo_);
  }
}

// P(Z > t) / phi(t_near) for t >= t_near.
double TruncatedGaussian::scaled_tail(double t) const {
  return std::exp(-0.5 * (t - t_near_) * (t + t_near_)) * mills_ratio(t);
}

double TruncatedGaussian::pdf(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  const double z = (x - mu_) / sigma_;
  if (deep_) return std::exp(-0.5 * (std::abs(z) - t_near_) * (std::abs(z) + t_near_)) / (sigma_ * mass_);
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * kPi) * sigma_ * mass_);
}

double TruncatedGaussian::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  const double z = (x - mu_) / sigma_;
  double v;
  if (deep_) {
    v = upper_tail_ ? scaled_tail(t_near_) - scaled_tail(z) : scaled_tail(-z) - scaled_tail(t_far_);
  } else {
    v = upper_tail_ ? normal_survival(z_lo_) - normal_survival(z) : normal_cdf(z) - normal_cdf(z_lo_);
  }
  return std::clamp(v / mass_, 0.0, 1.0);
}

double TruncatedGaussian::quantile(double p) const {
  double z;
  if (deep_) {
    // Solve scaled_tail(t) = target on [t_near, t_far]; the tail is decreasing in t.
    const double target = upper_tail_ ? scaled_tail(t_near_) - p * mass_ : scaled_tail(t_far_) + p * mass_;
    double a = t_near_, b = t_far_, t = t_near_;
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
      const double r = scaled_tail(t) - target;
      if (std::abs(r) <= 1e-16 * target) break;
      if (r > 0) a = t; else b = t;
      const double slope = std::exp(-0.5 * (t - t_near_) * (t + t_near_));
      const double next = t + r / slope;
      t = next > a && next < b ? next : 0.5 * (a + b);
    }
    z = upper_tail_ ? t : -t;
  } else if (upper_tail_) {
    z = -normal_quantile(normal_survival(z_lo_) - p * mass_);
  } else {
    z = normal_quantile(normal_cdf(z_lo_) + p * mass_);
  }
  return std::clamp(mu_ + sigma_ * z, lo_, hi_);
}

OrientationLaw orientation_law(const Scenario& s) {
  if (s.mode == MobilityMode::Stationary)
    return TruncatedLaplace(s.orientation.mean, s.orientation.stddev);
  return TruncatedGaussian(s.orientation.mean, s.orientation.stddev);
}

double orientation_pdf(const OrientationLaw& law, double theta) {
  return std::visit([theta](const auto& l) { return l.pdf(theta); }, law);
}

double orientation_cdf(const OrientationLaw& law, double theta) {
  return std::visit([theta](const auto& l) { return l.cdf(theta); }, law);
}

double orientation_sample(const OrientationLaw& law, RandomStream& stream) {
  const double u = stream.uniform();
  return std::visit([u](const auto& l) { return l.quantile(u); }, law);
}

double RadialLaw::pdf(double r) const {
  if (r < 0 || r > outer_) return 0.0;
  return r * pdf_over_r(r);
}

double RadialLaw::pdf_over_r(double r) const {
  if (r < 0 || r > outer_) return 0.0;
  const double re2 = outer_ * outer_;
  if (kind_ == Kind::UniformDisk) return 2.0 / re2;
  const double s = r / outer_;
  const double s2 = s * s;
  return (kRwpCoeffs[0] + s2 * (kRwpCoeffs[1] + s2 * kRwpCoeffs[2])) / re2;
}

double RadialLaw::cdf(double r) const {
  const double s = std::clamp(r / outer_, 0.0, 1.0);
  const double s2 = s * s;
  if (kind_ == Kind::UniformDisk) return s2;
  return s2 * (kRwpCoeffs[0] / 2.0 + s2 * (kRwpCoeffs[1] / 4.0 + s2 * kRwpCoeffs[2] / 6.0));
}

RadialLaw radial_law(const Scenario& s) {
  return s.mode == MobilityMode::Stationary ? RadialLaw::uniform_disk(s.cell.outer_radius)
                                            : RadialLaw::rwp(s.cell.outer_radius);
}

TruncatedRadial::TruncatedRadial(RadialLaw law, double radius)
    : law_(law), radius_(radius), mass_(law.cdf(radius)) {
  if (!(radius > 0) || radius > law.outer_radius() * (1 + 1e-12))
    throw DomainError("attocell radius must lie in (0, R_e]");
}

double TruncatedRadial::pdf(double r) const {
  if (r < 0 || r > radius_) return 0.0;
  return law_.pdf(r) / mass_;
}

double TruncatedRadial::pdf_over_r(double r) const {
  if (r < 0 || r > radius_) return 0.0;
  return law_.pdf_over_r(r) / mass_;
}

double TruncatedRadial::cdf(double r) const {
  if (r <= 0) return 0.0;
  if (r >= radius_) return 1.0;
  return law_.cdf(r) / mass_;
}

double TruncatedRadial::quantile(double p) const {
  if (law_.kind() == RadialLaw::Kind::UniformDisk) return radius_ * std::sqrt(p);
  // Safeguarded Newton on the renormalized polynomial CDF.
  const double target = p * mass_;
  double lo = 0.0, hi = radius_;
  double r = radius_ * std::sqrt(p);
  for (int it = 0; it < 60; ++it) {
    const double f = law_.cdf(r) - target;
    if (f > 0) hi = r; else lo = r;
    const double slope = law_.pdf(r);
    double next = slope > 0 ? r - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-15 * radius_) return next;
    r = next;
  }
  return r;
}

double radial_truncated_pdf(const RadialLaw& law, double radius, double r) {
  return TruncatedRadial(law, radius).pdf(r);
}

DistanceLaw::DistanceLaw(const Scenario& s)
    : radial_(radial_law(s), s.cell.attocell_radius),
      dh_(s.ap.height - s.ue.height),
      d_min_(dh_),
      d_max_(std::hypot(s.cell.attocell_radius, dh_)) {}

double DistanceLaw::pdf(double d) const {
  if (d < d_min_ || d > d_max_) return 0.0;
  // f_d(d) = d * f_r(r) / r; the ratio f_r(r)/r is evaluated in closed form so
  // the endpoint d = d_min needs no special casing.
  const double r = std::sqrt(std::max(0.0, (d - dh_) * (d + dh_)));
  return d * radial_.pdf_over_r(std::min(r, radial_.radius()));
}

double distance_pdf(const Scenario& s, double d) { return DistanceLaw(s).pdf(d); }

double arcsine_pdf(double x) {
  const double a = std::abs(x);
  if (a > 1.0) return 0.0;
  if (a == 1.0) return kArcsineEdgeDensity;
  return 1.0 / (kPi * std::sqrt((1.0 - x) * (1.0 + x)));
}

double arcsine_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::asin(x) / kPi + 0.5;
}

}  // namespace lifi
