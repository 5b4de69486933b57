#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace lifi {

struct SimplexOptions {
  double initial_step = 0.5;
  /// Stop when the spread of objective values over the simplex drops below this.
  double f_tol = 1e-14;
  /// Stop when the simplex diameter drops below this.
  double x_tol = 1e-10;
  int max_evaluations = 4000;
  /// Number of restarts from the best vertex with a fresh simplex.
  int restarts = 2;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  /// Best objective value after each restart round.
  std::vector<double> trace;
};

/// Nelder-Mead downhill simplex with the standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Non-finite objective values are
/// treated as +infinity.
template <typename F>
SimplexResult nelder_mead(F&& objective, Eigen::VectorXd start, const SimplexOptions& opt = {}) {
  const Eigen::Index n = start.size();
  SimplexResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd best = start;
  double best_value = eval(best);
  for (int round = 0; round <= opt.restarts; ++round) {
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), best);
    std::vector<double> vals(static_cast<std::size_t>(n + 1), best_value);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& p = pts[static_cast<std::size_t>(i + 1)];
      p(i) += opt.initial_step;
      vals[static_cast<std::size_t>(i + 1)] = eval(p);
    }
    std::vector<std::size_t> order(pts.size());
    while (result.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t lo = order.front(), hi = order.back(), next = order[order.size() - 2];
      double diameter = 0.0;
      for (const auto& p : pts) diameter = std::max(diameter, (p - pts[lo]).lpNorm<Eigen::Infinity>());
      if (vals[hi] - vals[lo] <= opt.f_tol * (1.0 + std::abs(vals[lo])) && diameter < 1e3 * opt.x_tol) break;
      if (diameter < opt.x_tol) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (i != hi) centroid += pts[i];
      centroid /= static_cast<double>(n);

      const Eigen::VectorXd reflected = centroid + (centroid - pts[hi]);
      const double fr = eval(reflected);
      if (fr < vals[lo]) {
        const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[hi]);
        const double fe = eval(expanded);
        if (fe < fr) {
          pts[hi] = expanded;
          vals[hi] = fe;
        } else {
          pts[hi] = reflected;
          vals[hi] = fr;
        }
        continue;
      }
      if (fr < vals[next]) {
        pts[hi] = reflected;
        vals[hi] = fr;
        continue;
      }
      const bool outside = fr < vals[hi];
      const Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                  : Eigen::VectorXd(centroid + 0.5 * (pts[hi] - centroid));
      const double fc = eval(contracted);
      if (fc < (outside ? fr : vals[hi])) {
        pts[hi] = contracted;
        vals[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == lo) continue;
        pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
        vals[i] = eval(pts[i]);
      }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    if (*it <= best_value) {
      best_value = *it;
      best = pts[static_cast<std::size_t>(it - vals.begin())];
    }
    result.trace.push_back(best_value);
    if (result.evaluations >= opt.max_evaluations) break;
  }
  result.x = best;
  result.value = best_value;
  return result;
}

}  // namespace lifi
