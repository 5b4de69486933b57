#pragma once

#include <array>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "lifi/scenario.hpp"

namespace lifi::testing {

struct TableCase {
  MobilityMode mode;
  double radius;
  double fov_deg;

  Scenario scenario() const { return Scenario::reference(mode, radius, deg_to_rad(fov_deg)); }
  std::string name() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s R=%g FOV=%g", to_string(mode).c_str(), radius, fov_deg);
    return buf;
  }
};

inline constexpr std::array<TableCase, 8> kTableCases{{
    {MobilityMode::Stationary, 1.0, 90.0},
    {MobilityMode::Stationary, 1.0, 60.0},
    {MobilityMode::Stationary, 2.5, 90.0},
    {MobilityMode::Stationary, 2.5, 60.0},
    {MobilityMode::Mobile, 1.0, 90.0},
    {MobilityMode::Mobile, 1.0, 60.0},
    {MobilityMode::Mobile, 2.5, 90.0},
    {MobilityMode::Mobile, 2.5, 60.0},
}};

/// Independent integrator for smooth integrands.
template <typename F>
double gk_integral(F f, double a, double b, double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

/// Independent integrator for integrands with endpoint singularities.
template <typename F>
double ts_integral(F f, double a, double b, double tol = 1e-12) {
  static boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule.integrate(f, a, b, tol);
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace lifi::testing
