#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>

namespace lifi {

/// Tolerances for the adaptive quadrature used throughout the library.
struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_depth = 20;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " + describe(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  static std::string describe(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  double achieved_error_;
};

template <typename Value>
struct QuadratureResult {
  Value value;
  Value error;
  bool converged = true;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double zero_like(double) { return 0.0; }
template <typename Derived>
auto zero_like(const Eigen::ArrayBase<Derived>& v) {
  return Eigen::ArrayXd::Zero(v.size()).eval();
}

inline double abs_of(double v) { return std::abs(v); }
template <typename Derived>
auto abs_of(const Eigen::ArrayBase<Derived>& v) {
  return v.abs().eval();
}

// Ratio of error to allowed error, worst component.
inline double badness(double err, double total, const QuadratureSpec& s) {
  return err / std::max(s.abs_tol, s.rel_tol * std::abs(total));
}
template <typename D1, typename D2>
double badness(const Eigen::ArrayBase<D1>& err, const Eigen::ArrayBase<D2>& total,
               const QuadratureSpec& s) {
  return (err / (s.rel_tol * total.abs()).max(s.abs_tol)).maxCoeff();
}

inline bool is_finite(double v) { return std::isfinite(v); }
template <typename Derived>
bool is_finite(const Eigen::ArrayBase<Derived>& v) {
  return v.allFinite();
}

template <typename Value>
struct Panel {
  double a;
  double b;
  int depth;
  Value value;
  Value error;
};

template <typename Value, typename F>
Panel<Value> kronrod_panel(F& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Value fc = f(center);
  Value kronrod = fc * kKronrodWeights[7];
  Value gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    Value pair = f(center - dx) + f(center + dx);
    kronrod = kronrod + pair * kKronrodWeights[j];
    if (j % 2 == 1) gauss = gauss + pair * kGaussWeights[j / 2];
  }
  Value value = kronrod * half;
  Value error = abs_of((kronrod - gauss) * half);
  return {a, b, depth, value, error};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of `f` over the breakpoints
/// `edges` (sorted, at least two). `Value` is `double` or an Eigen array; for
/// arrays the tolerance applies per component.
template <typename Value, typename F>
QuadratureResult<Value> integrate_panels(F&& f, const std::vector<double>& edges,
                                         const QuadratureSpec& spec) {
  using detail::Panel;
  std::vector<Panel<Value>> panels;
  panels.reserve(64);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] > edges[i]) panels.push_back(detail::kronrod_panel<Value>(f, edges[i], edges[i + 1], 0));
  }
  if (panels.empty()) {
    Value z = detail::zero_like(f(edges.front()));
    return {z, z, true, 1};
  }
  int evaluations = 15 * static_cast<int>(panels.size());

  auto totals = [&] {
    Value v = panels.front().value;
    Value e = panels.front().error;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      v = v + panels[i].value;
      e = e + panels[i].error;
    }
    return std::pair<Value, Value>{v, e};
  };

  auto [value, error] = totals();
  const std::size_t max_panels = 4096;
  while (detail::badness(error, value, spec) > 1.0 || !detail::is_finite(value)) {
    // Pick the panel with the largest contribution to the remaining error.
    std::size_t worst = panels.size();
    double worst_score = -1.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (panels[i].depth >= spec.max_depth) continue;
      const double score = detail::is_finite(panels[i].value)
                               ? detail::badness(panels[i].error, value, spec)
                               : std::numeric_limits<double>::infinity();
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    if (worst == panels.size() || panels.size() >= max_panels) {
      return {value, error, false, evaluations};
    }
    const auto p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = detail::kronrod_panel<Value>(f, p.a, mid, p.depth + 1);
    panels.push_back(detail::kronrod_panel<Value>(f, mid, p.b, p.depth + 1));
    evaluations += 30;
    std::tie(value, error) = totals();
  }
  return {value, error, true, evaluations};
}

template <typename F>
QuadratureResult<double> integrate(F&& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_panels<double>(std::forward<F>(f), std::vector<double>{a, b}, spec);
}

/// Sorts `points`, keeps those strictly inside (a, b) and brackets them with
/// the end points.
inline std::vector<double> breakpoints(double a, double b, std::vector<double> points) {
  std::vector<double> edges{a};
  std::sort(points.begin(), points.end());
  for (double p : points) {
    if (std::isfinite(p) && p > edges.back() && p < b) edges.push_back(p);
  }
  edges.push_back(b);
  return edges;
}

/// Integral over [a, b] with the change of variables x = mid + half*sin(s),
/// which cancels inverse square-root behavior at both end points.
template <typename Value, typename F>
QuadratureResult<Value> integrate_sine_mapped(F&& f, double a, double b,
                                              const QuadratureSpec& spec) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  auto g = [&](double s) -> Value {
    const double x = std::clamp(mid + half * std::sin(s), a, b);
    return f(x) * (half * std::cos(s));
  };
  return integrate_panels<Value>(g, std::vector<double>{-std::numbers::pi / 2, std::numbers::pi / 2}, spec);
}

/// Variable change applied on one piece of a composite integral.
enum class PieceMap {
  Linear,
  Sine,        // x = mid + half*sin(s): cancels inverse square roots at both ends
  Log,         // x = exp(s): for 1/x-like behavior on a piece away from zero
  PowerLeft,   // x = a + (b - a) s^3: clusters nodes at a (logarithmic end points)
  PowerRight,  // mirrored, clusters at b
};

struct Piece {
  double a;
  double b;
  PieceMap map = PieceMap::Linear;
};

/// Integral of f over the union of `pieces`, each under its own variable
/// change. All pieces share one adaptive error budget, so pieces that barely
/// contribute are not refined to their own relative tolerance.
template <typename Value, typename F>
QuadratureResult<Value> integrate_pieces(F&& f, const std::vector<Piece>& pieces, const QuadratureSpec& spec) {
  constexpr double pi = std::numbers::pi;
  std::vector<Piece> used;
  for (const Piece& p : pieces) {
    if (p.b > p.a && (p.map != PieceMap::Log || p.a > 0)) used.push_back(p);
  }
  if (used.empty()) {
    Value z = detail::zero_like(f(pieces.empty() ? 0.0 : pieces.front().a));
    return {z, z, true, 1};
  }
  auto g = [&](double s) -> Value {
    const std::size_t k = std::min(used.size() - 1, static_cast<std::size_t>(std::max(0.0, s)));
    const Piece& p = used[k];
    const double t = s - static_cast<double>(k);
    const double w = p.b - p.a;
    double x, jac;
    switch (p.map) {
      case PieceMap::Sine: {
        const double angle = pi * (t - 0.5);
        x = p.a + 0.5 * w * (1.0 + std::sin(angle));
        jac = 0.5 * w * pi * std::cos(angle);
        break;
      }
      case PieceMap::Log: {
        const double la = std::log(p.a), lb = std::log(p.b);
        x = std::exp(la + (lb - la) * t);
        jac = x * (lb - la);
        break;
      }
      case PieceMap::PowerLeft:
        x = p.a + w * t * t * t;
        jac = 3.0 * w * t * t;
        break;
      case PieceMap::PowerRight:
        x = p.b - w * t * t * t;
        jac = 3.0 * w * t * t;
        break;
      default:
        x = p.a + w * t;
        jac = w;
    }
    return f(std::clamp(x, p.a, p.b)) * jac;
  };
  std::vector<double> edges(used.size() + 1);
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k] = static_cast<double>(k);
  return integrate_panels<Value>(g, edges, spec);
}

}  // namespace lifi
