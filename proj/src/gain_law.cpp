#include "lifi/gain_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lifi/scenario.hpp"

namespace lifi {

namespace {

std::vector<double> fritsch_carlson_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> secant(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0) {
      m[i] = 0.0;
    } else {
      // Weighted harmonic mean (Fritsch-Butland), monotone by construction.
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
      m[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
    }
  }
  return m;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size()) throw std::invalid_argument("interpolant needs >= 2 matching nodes");
  slopes_ = fritsch_carlson_slopes(x_, y_);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)), slopes_(std::move(slopes)) {
  if (x_.size() < 2 || x_.size() != y_.size() || slopes_.size() != x_.size())
    throw std::invalid_argument("interpolant needs >= 2 matching nodes");
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
                   (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
  // Keep the value inside the node bracket; slopes supplied by the caller need
  // not be monotone-consistent.
  return std::clamp(v, std::min(y_[i], y_[i + 1]), std::max(y_[i], y_[i + 1]));
}

GainLaw::GainLaw(double p0, std::pair<double, double> support, Provenance provenance, std::string label,
                 std::vector<double> nodes, std::vector<double> pdf, std::vector<double> cdf, Density density)
    : p0_(p0),
      lo_(support.first),
      hi_(support.second),
      provenance_(provenance),
      label_(std::move(label)),
      nodes_(std::move(nodes)),
      pdf_(std::move(pdf)),
      cdf_(std::move(cdf)),
      density_fn_(std::move(density)) {
  if (!(p0_ >= 0 && p0_ <= 1)) throw DomainError("outage mass must lie in [0, 1]");
  if (!(lo_ <= hi_)) throw DomainError("gain support must be ordered");
  if (nodes_.size() < 2 || pdf_.size() != nodes_.size() || cdf_.size() != nodes_.size())
    throw DomainError("gain law table needs matching node, pdf and cdf columns");
  if (density_fn_) {
    cdf_interp_ = MonotoneCubic(nodes_, cdf_);
  } else {
    density_interp_ = MonotoneCubic(nodes_, pdf_);
    cdf_interp_ = MonotoneCubic(nodes_, cdf_, pdf_);
  }
}

double GainLaw::density(double h) const {
  if (h < lo_ || h > hi_) return 0.0;
  if (density_fn_) return density_fn_(h);
  return std::max(0.0, density_interp_(h));
}

double GainLaw::cdf(double h) const {
  if (h < 0) return 0.0;
  if (h >= hi_) return 1.0;
  if (h <= lo_) return p0_;
  return cdf_interp_(h);
}

double GainLaw::cdf_left(double h) const {
  if (h <= 0) return 0.0;
  return cdf(h);
}

std::vector<double> clustered_nodes(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double t = 0.5 * (1.0 - std::cos(kPi * k / (count - 1)));
    out[static_cast<std::size_t>(k)] = a + (b - a) * t;
  }
  out.front() = a;
  out.back() = b;
  return out;
}

}  // namespace lifi
