#include "lifi/scenario.hpp"

#include <cmath>
#include <sstream>

#include "lifi/format.hpp"

namespace lifi {

std::string to_string(MobilityMode mode) {
  return mode == MobilityMode::Stationary ? "stationary" : "mobile";
}

MobilityMode mobility_mode_from_string(const std::string& text) {
  if (text == "stationary") return MobilityMode::Stationary;
  if (text == "mobile") return MobilityMode::Mobile;
  throw DomainError("unknown activity '" + text + "' (expected stationary or mobile)");
}

OrientationParams default_orientation(MobilityMode mode) {
  if (mode == MobilityMode::Stationary) return {deg_to_rad(41.39), deg_to_rad(7.68)};
  return {deg_to_rad(29.67), deg_to_rad(7.78)};
}

double default_ue_height(MobilityMode mode) {
  return mode == MobilityMode::Stationary ? 0.9 : 1.4;
}

Scenario Scenario::reference(MobilityMode mode, double radius, double fov) {
  Scenario s;
  s.mode = mode;
  s.ue.height = default_ue_height(mode);
  s.ue.fov = fov;
  s.cell = {radius, radius};
  s.orientation = default_orientation(mode);
  return s;
}

std::string scenario_digest(const Scenario& s) {
  std::ostringstream os;
  auto put = [&os](const char* key, double v) { os << key << '=' << format_double(v) << ';'; };
  put("ap.height", s.ap.height);
  put("ap.semi_angle", s.ap.semi_angle);
  put("ap.conversion", s.ap.conversion);
  put("ue.height", s.ue.height);
  put("ue.responsivity", s.ue.responsivity);
  put("ue.area", s.ue.area);
  put("ue.refractive_index", s.ue.refractive_index);
  put("ue.fov", s.ue.fov);
  put("cell.radius", s.cell.attocell_radius);
  put("cell.outer_radius", s.cell.outer_radius);
  os << "mode=" << to_string(s.mode) << ';';
  put("orientation.mean", s.orientation.mean);
  put("orientation.stddev", s.orientation.stddev);
  return fnv1a_hex(os.str());
}

void validate(const Scenario& s) {
  if (!(s.ap.height > 0)) throw DomainError("AP height must be positive");
  if (!(s.ap.semi_angle > 0 && s.ap.semi_angle < kPi / 2))
    throw DomainError("LED semi-angle must lie in (0, 90) degrees");
  if (!(s.ap.conversion > 0)) throw DomainError("conversion factor must be positive");
  if (!(s.ue.height >= 0 && s.ue.height < s.ap.height))
    throw DomainError("UE height must lie in [0, AP height)");
  if (!(s.ue.responsivity > 0 && s.ue.area > 0 && s.ue.refractive_index > 0))
    throw DomainError("photodiode responsivity, area and refractive index must be positive");
  if (!(s.ue.fov > 0 && s.ue.fov <= kPi / 2))
    throw DomainError("field of view must lie in (0, 90] degrees");
  if (!(s.cell.attocell_radius > 0 && s.cell.attocell_radius <= s.cell.outer_radius))
    throw DomainError("cell radii must satisfy 0 < R <= R_e");
  if (!(s.orientation.stddev > 0) || !std::isfinite(s.orientation.mean))
    throw DomainError("orientation law needs a finite mean and positive spread");
}

double lambertian_order(double semi_angle) {
  const double c = std::cos(semi_angle);
  if (!(semi_angle > 0) || !(c > 1e-12))
    throw DomainError("semi-angle must lie in (0, pi/2) with cos > 1e-12");
  return -std::log(2.0) / std::log(c);
}

double channel_constant(const Scenario& s) {
  const double sin_fov = std::sin(s.ue.fov);
  if (!(sin_fov > 0)) throw DomainError("field of view must be positive");
  const double m = lambertian_order(s.ap.semi_angle);
  const double n = s.ue.refractive_index;
  return s.ap.conversion * s.ue.responsivity * ((m + 1.0) / (2.0 * kPi)) *
         (n * n * s.ue.area / (sin_fov * sin_fov));
}

DistanceBounds distance_bounds(const Scenario& s) {
  const double dh = s.ap.height - s.ue.height;
  return {dh, std::hypot(s.cell.attocell_radius, dh)};
}

GainBounds gain_bounds(const Scenario& s) {
  const LinkGeometry g(s);
  const double scaled = g.c * g.cos_fov;
  return {0.0, scaled / std::pow(g.d_max, g.m + 2.0), scaled / std::pow(g.d_min, g.m + 2.0),
          g.h_max};
}

LinkGeometry::LinkGeometry(const Scenario& s)
    : m(lambertian_order(s.ap.semi_angle)),
      h0(channel_constant(s)),
      dh(s.ap.height - s.ue.height),
      c(h0 * std::pow(dh, m)),
      d_min(dh),
      d_max(std::hypot(s.cell.attocell_radius, dh)),
      cos_fov(std::cos(s.ue.fov)),
      h_max(h0 / (dh * dh)) {
  // cos(pi/2) is 6e-17 in floating point; treat it as the exact zero it is.
  if (std::abs(cos_fov) < 1e-15) cos_fov = 0.0;
}

}  // namespace lifi
