#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace lifi {

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant through (x, y).
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  /// Hermite interpolant with caller-supplied node slopes.
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  double operator()(double x) const;

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 private:
  std::vector<double> x_, y_, slopes_;
};

/// Law of the channel gain: an atom of mass p0 at zero (outage) plus a
/// continuous density on [lo, hi], tabulated on a node grid.
class GainLaw {
 public:
  enum class Provenance { Exact, Fitted, Empirical };

  using Density = std::function<double(double)>;

  /// Table-backed law. The cdf column is interpolated by cubic Hermite with the
  /// pdf column as slopes. When `density` is given it replaces the interpolated
  /// pdf and the cdf is interpolated from its own values only.
  GainLaw(double p0, std::pair<double, double> support, Provenance provenance, std::string label,
          std::vector<double> nodes, std::vector<double> pdf, std::vector<double> cdf, Density density = {});

  double outage_mass() const { return p0_; }
  std::pair<double, double> support() const { return {lo_, hi_}; }
  Provenance provenance() const { return provenance_; }
  /// "exact", "fitted:MB", "empirical", ...
  const std::string& label() const { return label_; }

  /// Density of the continuous part; integrates to 1 - p0.
  double density(double h) const;
  double cdf(double h) const;
  double cdf_left(double h) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& pdf_values() const { return pdf_; }
  const std::vector<double>& cdf_values() const { return cdf_; }

 private:
  double p0_, lo_, hi_;
  Provenance provenance_;
  std::string label_;
  std::vector<double> nodes_, pdf_, cdf_;
  Density density_fn_;
  MonotoneCubic density_interp_;
  MonotoneCubic cdf_interp_;
};

/// Nodes on [a, b] clustered towards both ends (Chebyshev-Lobatto spacing).
std::vector<double> clustered_nodes(double a, double b, int count);

}  // namespace lifi
