#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lifi {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Ceiling access point.
struct ApParams {
  double height = 2.4;                  // h_a [m]
  double semi_angle = deg_to_rad(60.0);  // half-power semi-angle [rad]
  double conversion = 0.7;              // electrical-to-optical factor [W/A]

  bool operator==(const ApParams&) const = default;
};

/// User equipment photodiode.
struct UeParams {
  double height = 0.9;            // h_u [m]
  double responsivity = 0.6;      // [A/W]
  double area = 1e-4;             // geometric area [m^2]
  double refractive_index = 1.0;  // concentrator index
  double fov = deg_to_rad(90.0);  // field of view [rad]

  bool operator==(const UeParams&) const = default;
};

struct CellGeometry {
  double attocell_radius = 1.0;  // R [m]
  double outer_radius = 1.0;     // R_e [m]

  bool operator==(const CellGeometry&) const = default;
};

enum class MobilityMode { Stationary, Mobile };

std::string to_string(MobilityMode mode);
MobilityMode mobility_mode_from_string(const std::string& text);

/// Location and scale of the elevation-angle law (truncated Laplace for
/// stationary users, truncated Gaussian for mobile users) on [0, pi/2].
struct OrientationParams {
  double mean;
  double stddev;

  bool operator==(const OrientationParams&) const = default;
};

OrientationParams default_orientation(MobilityMode mode);
double default_ue_height(MobilityMode mode);

struct Scenario {
  ApParams ap;
  UeParams ue;
  CellGeometry cell;
  MobilityMode mode = MobilityMode::Stationary;
  OrientationParams orientation = default_orientation(MobilityMode::Stationary);

  bool operator==(const Scenario&) const = default;

  /// Measurement-campaign defaults for the given activity, attocell radius and
  /// field of view. The outer radius equals the attocell radius.
  static Scenario reference(MobilityMode mode, double radius, double fov);
};

/// Stable hash of the canonical field listing; identifies the scenario in
/// output headers.
std::string scenario_digest(const Scenario& s);

/// Throws DomainError when any invariant of the configuration is violated.
void validate(const Scenario& s);

double lambertian_order(double semi_angle);
double channel_constant(const Scenario& s);

struct DistanceBounds {
  double min;
  double max;
};
DistanceBounds distance_bounds(const Scenario& s);

struct GainBounds {
  double h_min;
  double h_star_min;
  double h_star_max;
  double h_max;
};
GainBounds gain_bounds(const Scenario& s);

/// Derived constants of a validated scenario, precomputed once for the hot
/// loops of sampling and quadrature.
struct LinkGeometry {
  double m;          // Lambertian order
  double h0;         // channel constant
  double dh;         // h_a - h_u
  double c;          // h0 * dh^m
  double d_min;
  double d_max;
  double cos_fov;
  double h_max;

  explicit LinkGeometry(const Scenario& s);

  /// Largest gain reachable at distance d (upright receiver facing the AP).
  double peak_gain_at(double d) const { return c / std::pow(d, m + 2.0); }
};

}  // namespace lifi
