#include "lifi/exact_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lifi/parallel.hpp"

namespace lifi {

namespace {

constexpr double kHalfPi = kPi / 2;

template <typename Value>
Value checked(const QuadratureResult<Value>& res, const char* what) {
  if (!res.converged) {
    double err;
    if constexpr (std::is_same_v<Value, double>) {
      err = res.error;
    } else {
      err = res.error.maxCoeff();
    }
    throw QuadratureError(std::string("quadrature did not converge: ") + what, err);
  }
  return res.value;
}

// Threshold u(theta) = (cos(gamma) - cos(beta) cos(theta)) / (sin(beta) sin(theta))
// on the azimuth cosine, written in half angles so that it keeps full relative
// accuracy when theta approaches |beta - gamma|.
struct ArcsineArgument {
  ArcsineArgument(double beta, double gamma)
      : cos_beta(std::cos(beta)),
        sin_beta(std::sin(beta)),
        offset(2.0 * std::sin(0.5 * (gamma + beta)) * std::sin(0.5 * (gamma - beta))) {}

  double operator()(double theta) const {
    const double half = std::sin(0.5 * theta);
    return (2.0 * cos_beta * half * half - offset) / (sin_beta * std::sin(theta));
  }

  double cos_beta, sin_beta, offset;
};

// Pieces of `edges`, power-mapped towards the point `singular` where it is an
// end point.
std::vector<Piece> distance_pieces(const std::vector<double>& edges, double singular) {
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    PieceMap map = PieceMap::Linear;
    if (edges[k] == singular) map = PieceMap::PowerLeft;
    if (edges[k + 1] == singular) map = PieceMap::PowerRight;
    pieces.push_back({edges[k], edges[k + 1], map});
  }
  return pieces;
}

}  // namespace

ExactGainLaw::ExactGainLaw(const Scenario& s, QuadratureSpec spec)
    : scenario_(s),
      geom_((validate(s), s)),
      bounds_(gain_bounds(s)),
      distance_(s),
      orientation_(orientation_law(s)),
      spec_(spec),
      inner_spec_{spec.rel_tol * 0.1, spec.abs_tol * 1e-2, spec.max_depth},
      theta_mu_(s.orientation.mean) {
  if (!(spec.rel_tol > 0 && spec.abs_tol > 0)) throw DomainError("quadrature tolerances must be positive");
  std::vector<double> points;
  if (geom_.cos_fov > 0) points.push_back(geom_.dh / geom_.cos_fov);
  const double sin_fov = std::sin(s.ue.fov);
  if (sin_fov > 0) points.push_back(geom_.dh / sin_fov);
  auto integrand = [&](double d) { return distance_.pdf(d) * conditional_cos_cdf(d, geom_.cos_fov); };
  p0_ = std::clamp(checked(integrate_panels<double>(integrand, breakpoints(geom_.d_min, geom_.d_max, points), spec_),
                           "outage probability"),
                   0.0, 1.0);
}

template <typename Value, typename F>
Value ExactGainLaw::integrate_theta(F&& f, double lo, double hi, std::vector<double> points,
                                    bool log_zone) const {
  points.push_back(theta_mu_);
  // When the lower end sits close to zero the integrand behaves like 1/theta
  // away from it; integrate that stretch in log(theta).
  const bool use_log = log_zone && lo > 0 && lo < 0.05 * hi;
  double log_a = 0, log_b = 0;
  if (use_log) {
    log_a = 2 * lo;
    log_b = 0.5 * hi;
    points.push_back(log_a);
    points.push_back(log_b);
  }
  const std::vector<double> edges = breakpoints(lo, hi, points);
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    const bool in_log = use_log && a >= log_a && b <= log_b;
    pieces.push_back({a, b, in_log ? PieceMap::Log : PieceMap::Sine});
  }
  return integrate_pieces<Value>(f, pieces, inner_spec_).value;
}

double ExactGainLaw::conditional_cos_cdf(double d, double t) const {
  if (t >= 1.0) return 1.0;
  if (t < -1.0) return 0.0;
  const double dh = geom_.dh;
  const double r = std::sqrt(std::max(0.0, d * d - dh * dh));
  const double gamma = std::acos(t);
  if (r <= 1e-15 * d) return 1.0 - orientation_cdf(orientation_, gamma);
  const double beta = std::atan2(r, dh);
  double p = 1.0 - orientation_cdf(orientation_, beta + gamma);
  if (beta > gamma) p += orientation_cdf(orientation_, beta - gamma);
  const double lo = std::abs(beta - gamma);
  const double hi = std::min(beta + gamma, kHalfPi);
  if (lo < hi) {
    const ArcsineArgument arg(beta, gamma);
    auto f = [&](double theta) -> double { return arcsine_cdf(arg(theta)) * orientation_pdf(orientation_, theta); };
    p += integrate_theta<double>(f, lo, hi, {}, false);
  }
  return std::clamp(p, 0.0, 1.0);
}

double ExactGainLaw::conditional_density(double h, double d) const {
  const double scale = std::pow(d, geom_.m + 2.0) / geom_.c;
  const double t = h * scale;
  if (!(t > geom_.cos_fov) || t >= 1.0) return 0.0;
  const double dh = geom_.dh;
  const double r = std::sqrt(std::max(0.0, d * d - dh * dh));
  const double gamma = std::acos(t);
  if (r <= 1e-15 * d) return orientation_pdf(orientation_, gamma) * scale / std::sin(gamma);
  const double beta = std::atan2(r, dh);
  const double lo = std::abs(beta - gamma);
  const double hi = std::min(beta + gamma, kHalfPi);
  if (!(lo < hi)) return 0.0;
  const ArcsineArgument arg(beta, gamma);
  auto f = [&](double theta) -> double {
    const double u = arg(theta);
    if (!(std::abs(u) < 1.0)) return 0.0;
    return arcsine_pdf(u) * orientation_pdf(orientation_, theta) / (r * std::sin(theta));
  };
  return d * scale * integrate_theta<double>(f, lo, hi, {}, true);
}

double ExactGainLaw::outage() const { return p0_; }

double ExactGainLaw::distance_lower(double h) const {
  if (geom_.cos_fov <= 0) return geom_.d_min;
  if (h <= 0) return geom_.d_max;
  return std::max(geom_.d_min, std::pow(geom_.c * geom_.cos_fov / h, 1.0 / (geom_.m + 2.0)));
}

double ExactGainLaw::distance_upper(double h) const {
  if (h <= 0) return geom_.d_max;
  return std::min(geom_.d_max, std::pow(geom_.c / h, 1.0 / (geom_.m + 2.0)));
}

double ExactGainLaw::boundary_term(double h) const {
  if (geom_.cos_fov <= 0 || h <= 0) return 0.0;
  const double d0 = std::pow(geom_.c * geom_.cos_fov / h, 1.0 / (geom_.m + 2.0));
  if (d0 <= geom_.d_min || d0 >= geom_.d_max) return 0.0;
  const double speed = d0 / ((geom_.m + 2.0) * h);
  const double t = std::min(1.0, h * std::pow(d0, geom_.m + 2.0) / geom_.c);
  const double jump = conditional_cos_cdf(d0, t) - conditional_cos_cdf(d0, geom_.cos_fov);
  return speed * distance_.pdf(d0) * jump;
}

double ExactGainLaw::pdf(double h, PdfOptions options) const {
  if (h < 0 || h >= geom_.h_max) return 0.0;
  if (h == 0) {
    if (bounds_.h_star_min > 0) return 0.0;
    // Continuous support starts at zero: report the right limit.
    h = 1e-12 * geom_.h_max;
  }
  const double lo = distance_lower(h);
  const double hi = distance_upper(h);
  double value = 0.0;
  if (lo < hi) {
    const double singular = h > 0 ? std::pow(geom_.c * geom_.dh / h, 1.0 / (geom_.m + 3.0)) : -1.0;
    auto f = [&](double d) { return distance_.pdf(d) * conditional_density(h, d); };
    // Absolute tolerance on the density of h / h_max. Just below h_max the map
    // from gain to incidence angle loses digits, so it never goes below 1e-12.
    QuadratureSpec spec = spec_;
    spec.abs_tol = std::max(spec_.abs_tol, 1e-12) / geom_.h_max;
    value = checked(integrate_pieces<double>(f, distance_pieces(breakpoints(lo, hi, {singular}), singular), spec),
                    "gain density");
  }
  if (options.boundary_term) value += boundary_term(h);
  return std::max(0.0, value);
}

double ExactGainLaw::cdf(double h) const {
  if (h < 0) return 0.0;
  if (h >= geom_.h_max) return 1.0;
  const double lo = distance_lower(h);
  double cont = 0.0;
  if (h > 0 && lo < geom_.d_max) {
    std::vector<double> points{distance_upper(h), std::pow(geom_.c * geom_.dh / h, 1.0 / (geom_.m + 3.0))};
    auto f = [&](double d) {
      const double t = std::min(1.0, std::max(geom_.cos_fov, h * std::pow(d, geom_.m + 2.0) / geom_.c));
      return distance_.pdf(d) * (conditional_cos_cdf(d, t) - conditional_cos_cdf(d, geom_.cos_fov));
    };
    cont = checked(integrate_panels<double>(f, breakpoints(lo, geom_.d_max, points), spec_), "gain CDF");
  }
  return std::clamp(p0_ + cont, 0.0, 1.0);
}

Eigen::ArrayXd ExactGainLaw::normalized_moments(int max_order) const {
  if (max_order < 0) throw DomainError("moment order must be nonnegative");
  const int n = max_order + 1;
  const double dh = geom_.dh;
  const double cf = geom_.cos_fov;
  const double fov = scenario_.ue.fov;

  // Binomial coefficients C(i, j).
  Eigen::ArrayXXd binom = Eigen::ArrayXXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    binom(i, 0) = 1.0;
    for (int j = 1; j <= i; ++j) binom(i, j) = binom(i - 1, j - 1) + (j < i ? binom(i - 1, j) : 0.0);
  }

  // E over the azimuth difference of (k (A cos(phi) + B))^i restricted to the
  // FOV branch, phi uniform on [0, pi].
  auto azimuth_average = [&](double a, double b, double k) -> Eigen::ArrayXd {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    double phi_c;
    if (a <= 1e-300) {
      phi_c = b > cf ? kPi : 0.0;
    } else {
      const double uc = (cf - b) / a;
      if (uc >= 1.0) return out;
      phi_c = uc <= -1.0 ? kPi : std::acos(uc);
    }
    if (phi_c <= 0) return out;
    const double cphi = std::cos(phi_c), sphi = std::sin(phi_c);
    Eigen::ArrayXd cos_pow_int(n);  // integral of cos^j over [0, phi_c]
    cos_pow_int(0) = phi_c;
    if (n > 1) cos_pow_int(1) = sphi;
    for (int j = 2; j < n; ++j)
      cos_pow_int(j) = std::pow(cphi, j - 1) * sphi / j + (j - 1.0) / j * cos_pow_int(j - 2);
    double kp = 1.0;
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j <= i; ++j) sum += binom(i, j) * std::pow(a, j) * std::pow(b, i - j) * cos_pow_int(j);
      out(i) = kp * sum / kPi;
      kp *= k;
    }
    return out;
  };

  auto over_theta = [&](double d) -> Eigen::ArrayXd {
    const double r = std::sqrt(std::max(0.0, d * d - dh * dh));
    const double beta = std::atan2(r, dh);
    const double k = std::pow(dh / d, geom_.m + 2.0);
    auto f = [&](double theta) -> Eigen::ArrayXd {
      return azimuth_average(r * std::sin(theta) / d, dh * std::cos(theta) / d, k) *
             orientation_pdf(orientation_, theta);
    };
    return integrate_theta<Eigen::ArrayXd>(f, 0.0, kHalfPi, {std::abs(beta - fov), beta + fov}, false);
  };

  std::vector<double> points;
  if (cf > 0) points.push_back(dh / cf);
  if (std::sin(fov) > 0) points.push_back(dh / std::sin(fov));
  auto g = [&](double d) -> Eigen::ArrayXd { return over_theta(d) * distance_.pdf(d); };
  return checked(integrate_panels<Eigen::ArrayXd>(g, breakpoints(geom_.d_min, geom_.d_max, points), spec_),
                 "gain moments");
}

double ExactGainLaw::expectation(const std::function<double(double)>& g, std::span<const double> knots,
                                 const QuadratureSpec& spec) const {
  const double dh = geom_.dh;
  const double cf = geom_.cos_fov;
  const double fov = scenario_.ue.fov;
  const QuadratureSpec inner{spec.rel_tol * 0.1, spec.abs_tol * 1e-2, spec.max_depth};

  auto azimuth_average = [&](double a, double b, double k) {
    double phi_c;
    if (a <= 1e-300) {
      phi_c = b > cf ? kPi : 0.0;
    } else {
      const double uc = (cf - b) / a;
      if (uc >= 1.0) return 0.0;
      phi_c = uc <= -1.0 ? kPi : std::acos(uc);
    }
    if (phi_c <= 0) return 0.0;
    const double scale = geom_.h_max * k;
    std::vector<double> points;
    if (a > 1e-300) {
      for (double v : knots) {
        const double u = (v / scale - b) / a;
        if (u > -1.0 && u < 1.0) points.push_back(std::acos(u));
      }
    }
    auto f = [&](double phi) { return g(scale * (a * std::cos(phi) + b)); };
    return checked(integrate_panels<double>(f, breakpoints(0.0, phi_c, points), inner), "expectation azimuth") / kPi;
  };

  auto over_theta = [&](double d) {
    const double r = std::sqrt(std::max(0.0, d * d - dh * dh));
    const double beta = std::atan2(r, dh);
    const double k = std::pow(dh / d, geom_.m + 2.0);
    auto f = [&](double theta) {
      return azimuth_average(r * std::sin(theta) / d, dh * std::cos(theta) / d, k) * orientation_pdf(orientation_, theta);
    };
    return integrate_theta<double>(f, 0.0, kHalfPi, {std::abs(beta - fov), beta + fov}, false);
  };

  std::vector<double> points;
  if (cf > 0) points.push_back(dh / cf);
  if (std::sin(fov) > 0) points.push_back(dh / std::sin(fov));
  auto h = [&](double d) { return over_theta(d) * distance_.pdf(d); };
  return checked(integrate_panels<double>(h, breakpoints(geom_.d_min, geom_.d_max, points), spec), "expectation");
}

std::vector<double> ExactGainLaw::key_gains() const {
  const double lo = support_lo(), hi = support_hi();
  const double c = geom_.c, m = geom_.m;
  const double r_max = std::sqrt(geom_.d_max * geom_.d_max - geom_.dh * geom_.dh);
  std::vector<double> candidates{
      bounds_.h_star_max,
      c * geom_.dh / std::pow(geom_.d_max, m + 3.0),
      c * r_max / std::pow(geom_.d_max, m + 3.0),
      geom_.h_max * std::cos(std::clamp(theta_mu_, 0.0, kHalfPi)),
  };
  std::vector<double> keys{lo};
  std::sort(candidates.begin(), candidates.end());
  const double gap = 1e-3 * (hi - lo);
  for (double v : candidates) {
    if (v > keys.back() + gap && v < hi - gap) keys.push_back(v);
  }
  keys.push_back(hi);
  return keys;
}

double outage_probability(const Scenario& s, const QuadratureSpec& spec) { return ExactGainLaw(s, spec).outage(); }

double exact_pdf(const Scenario& s, double h, const QuadratureSpec& spec, PdfOptions options) {
  return ExactGainLaw(s, spec).pdf(h, options);
}

double exact_cdf(const Scenario& s, double h, const QuadratureSpec& spec) { return ExactGainLaw(s, spec).cdf(h); }

double exact_moments(const Scenario& s, int i, const QuadratureSpec& spec) {
  if (i < 1) throw DomainError("moment order must be at least 1");
  const ExactGainLaw law(s, spec);
  return law.normalized_moments(i)(i) * std::pow(law.geometry().h_max, i);
}

GainLaw tabulate_law(const ExactGainLaw& law, int grid_size, unsigned workers) {
  if (grid_size < 64) throw DomainError("grid size must be at least 64");
  const std::vector<double> keys = law.key_gains();
  const double span = keys.back() - keys.front();
  std::vector<double> nodes{keys.front()};
  for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
    const int count = std::max(9, static_cast<int>(std::lround(grid_size * (keys[k + 1] - keys[k]) / span)) + 1);
    const auto seg = clustered_nodes(keys[k], keys[k + 1], count);
    nodes.insert(nodes.end(), seg.begin() + 1, seg.end());
  }
  std::vector<double> pdf(nodes.size()), cdf(nodes.size());
  parallel_for(nodes.size(), workers, [&](std::size_t i) {
    pdf[i] = law.pdf(nodes[i]);
    cdf[i] = law.cdf(nodes[i]);
  });
  // Quadrature noise must not break monotonicity of the table.
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] = std::max(cdf[i], cdf[i - 1]);
  return GainLaw(law.outage(), {keys.front(), keys.back()}, GainLaw::Provenance::Exact, "exact", std::move(nodes),
                 std::move(pdf), std::move(cdf));
}

GainLaw tabulate_law(const Scenario& s, int grid_size, const QuadratureSpec& spec, unsigned workers) {
  return tabulate_law(ExactGainLaw(s, spec), grid_size, workers);
}

}  // namespace lifi
