#include "lifi/fitted_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifi/parallel.hpp"
#include "lifi/random.hpp"

namespace lifi {

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::MTL: return "MTL";
    case ModelTag::MB: return "MB";
    case ModelTag::SMTG: return "SMTG";
    case ModelTag::SMB: return "SMB";
  }
  return "?";
}

ModelTag model_tag_from_string(const std::string& text) {
  for (ModelTag t : {ModelTag::MTL, ModelTag::MB, ModelTag::SMTG, ModelTag::SMB}) {
    if (text == to_string(t)) return t;
  }
  throw DomainError("unknown model '" + text + "' (expected MTL, MB, SMTG or SMB)");
}

int matched_moment_count(ModelTag tag) { return tag == ModelTag::MTL || tag == ModelTag::MB ? 3 : 9; }

MobilityMode intended_mode(ModelTag tag) {
  return tag == ModelTag::MTL || tag == ModelTag::MB ? MobilityMode::Stationary : MobilityMode::Mobile;
}

ModelTag tag_of(const ModelParams& params) {
  static constexpr ModelTag kTags[] = {ModelTag::MTL, ModelTag::MB, ModelTag::SMTG, ModelTag::SMB};
  return kTags[params.index()];
}

ModelSupport fit_support(const Scenario& s, double floor_fraction) {
  const GainBounds b = gain_bounds(s);
  return {std::max(b.h_star_min, floor_fraction * b.h_max), b.h_max};
}

namespace {

bool is_beta_family(const ModelParams& p) {
  return std::holds_alternative<MbParams>(p) || std::holds_alternative<SmbParams>(p);
}

double mb_kernel(const MbParams& p, double x, double from_lo, double to_hi, double width) {
  return std::pow(x, -p.nu) * std::pow(from_lo / width, p.alpha - 1.0) * std::pow(to_hi / width, p.beta - 1.0);
}

// Kernel with the distances to both support ends passed separately, so that
// the Beta factors stay accurate where x itself cannot resolve them.
double kernel_at(const ModelParams& params, double x, double from_lo, double to_hi, double width) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MtlParams>) {
          return std::pow(x, -p.nu) * std::exp(-std::abs(x - p.mu) / p.b);
        } else if constexpr (std::is_same_v<T, MbParams>) {
          return mb_kernel(p, x, from_lo, to_hi, width);
        } else if constexpr (std::is_same_v<T, SmtgParams>) {
          double sum = 0.0;
          for (const auto& c : p.components) {
            const double z = (x - c.mu) / c.sigma;
            sum += std::pow(x, -c.nu) * std::exp(-0.5 * z * z);
          }
          return sum;
        } else {
          double sum = 0.0;
          for (const auto& c : p.components) sum += mb_kernel(c, x, from_lo, to_hi, width);
          return sum;
        }
      },
      params);
}

enum class Map { Linear, Log, PowerLeft, PowerRight };

struct KernelPiece {
  double a;
  double b;
  Map map;
  double power;
};

// Exponents that turn (x - lo)^(alpha - 1) and (1 - x)^(beta - 1) into smooth
// integrands: x - lo = w t^p with p = 1 / alpha.
std::pair<double, double> edge_powers(const ModelParams& params) {
  double left = 1.0, right = 1.0;
  auto take = [&](const MbParams& c) {
    left = std::max(left, 1.0 / c.alpha);
    right = std::max(right, 1.0 / c.beta);
  };
  if (const auto* mb = std::get_if<MbParams>(&params)) take(*mb);
  if (const auto* smb = std::get_if<SmbParams>(&params))
    for (const auto& c : smb->components) take(c);
  return {left, right};
}

std::vector<KernelPiece> kernel_pieces(const ModelParams& params, double x_lo, double a, double b) {
  std::vector<double> points;
  if (const auto* mtl = std::get_if<MtlParams>(&params)) points.push_back(mtl->mu);
  if (const auto* smtg = std::get_if<SmtgParams>(&params)) {
    for (const auto& c : smtg->components) {
      points.push_back(c.mu);
      points.push_back(c.mu - 4 * c.sigma);
      points.push_back(c.mu + 4 * c.sigma);
    }
  }
  const bool beta = is_beta_family(params);
  // Near a small lower edge x^-nu varies on the scale of x itself.
  const bool log_zone = a < 0.02 && b > 0.1;
  if (log_zone) {
    points.push_back(2 * a);
    points.push_back(0.1);
  }
  if (beta) points.push_back(0.5 * (a + b));
  const std::vector<double> edges = breakpoints(a, b, points);
  const auto [p_left, p_right] = edge_powers(params);
  std::vector<KernelPiece> pieces;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    KernelPiece piece{edges[k], edges[k + 1], Map::Linear, 1.0};
    if (beta && piece.a == x_lo) {
      piece.map = Map::PowerLeft;
      piece.power = p_left;
    } else if (beta && piece.b == 1.0) {
      piece.map = Map::PowerRight;
      piece.power = p_right;
    } else if (log_zone && piece.a >= 2 * a && piece.b <= 0.1) {
      piece.map = Map::Log;
    }
    pieces.push_back(piece);
  }
  return pieces;
}

// Integral of weight(x) * kernel(x) over the pieces; `weight` maps x to a Value.
template <typename Value, typename Weight>
QuadratureResult<Value> integrate_kernel(const ModelParams& params, double x_lo, const std::vector<KernelPiece>& pieces,
                                         Weight&& weight, const QuadratureSpec& spec) {
  const double width = 1.0 - x_lo;
  auto g = [&](double s) -> Value {
    const std::size_t k = std::min(pieces.size() - 1, static_cast<std::size_t>(std::max(0.0, s)));
    const KernelPiece& p = pieces[k];
    const double t = s - static_cast<double>(k);
    const double w = p.b - p.a;
    double x, jac, from_lo, to_hi;
    switch (p.map) {
      case Map::PowerLeft: {
        const double off = w * std::pow(t, p.power);
        jac = p.power * w * std::pow(t, p.power - 1.0);
        x = p.a + off;
        from_lo = off;
        to_hi = 1.0 - x;
        break;
      }
      case Map::PowerRight: {
        const double off = w * std::pow(t, p.power);
        jac = p.power * w * std::pow(t, p.power - 1.0);
        x = p.b - off;
        to_hi = off;
        from_lo = x - x_lo;
        break;
      }
      case Map::Log: {
        const double la = std::log(p.a), lb = std::log(p.b);
        x = std::exp(la + (lb - la) * t);
        jac = x * (lb - la);
        from_lo = x - x_lo;
        to_hi = 1.0 - x;
        break;
      }
      default:
        x = p.a + w * t;
        jac = w;
        from_lo = x - x_lo;
        to_hi = 1.0 - x;
    }
    if (!(from_lo > 0) || !(to_hi > 0)) return weight(x) * 0.0;
    return weight(x) * (kernel_at(params, x, from_lo, to_hi, width) * jac);
  };
  std::vector<double> edges(pieces.size() + 1);
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k] = static_cast<double>(k);
  return integrate_panels<Value>(g, edges, spec);
}

const QuadratureSpec kTableSpec{1e-10, 1e-300, 30};

}  // namespace

double model_kernel(const ModelParams& params, double x, double x_lo) {
  if (x < x_lo || x > 1.0) return 0.0;
  return kernel_at(params, x, x - x_lo, 1.0 - x, 1.0 - x_lo);
}

Eigen::ArrayXd kernel_moments(const ModelParams& params, double x_lo, int max_order, const QuadratureSpec& spec) {
  if (!(x_lo > 0 && x_lo < 1)) throw DomainError("normalized support edge must lie in (0, 1)");
  const int n = max_order + 1;
  auto powers = [n](double x) -> Eigen::ArrayXd {
    Eigen::ArrayXd v(n);
    double p = 1.0;
    for (int i = 0; i < n; ++i, p *= x) v(i) = p;
    return v;
  };
  const auto res = integrate_kernel<Eigen::ArrayXd>(params, x_lo, kernel_pieces(params, x_lo, x_lo, 1.0), powers, spec);
  if (!res.converged || !res.value.allFinite())
    throw QuadratureError("model moments did not converge", res.error.maxCoeff());
  return res.value;
}

double normalization(const ModelParams& params, const ModelSupport& support, double p0) {
  if (!(p0 >= 0 && p0 < 1)) throw DomainError("outage mass must lie in [0, 1)");
  const double z = kernel_moments(params, support.lo / support.hi, 0)(0);
  if (!(z > 0) || !std::isfinite(z)) throw DomainError("model kernel is not integrable");
  return support.hi * z / (1.0 - p0);
}

double model_pdf(const FittedModel& model, double h) {
  if (h < model.support.lo || h > model.support.hi) return 0.0;
  const double m = normalization(model.params, model.support, model.p0);
  return model_kernel(model.params, h / model.support.hi, model.support.lo / model.support.hi) / m;
}

double model_moments(const FittedModel& model, int i) {
  if (i < 1) throw DomainError("moment order must be at least 1");
  const Eigen::ArrayXd m = kernel_moments(model.params, model.support.lo / model.support.hi, i);
  return std::pow(model.support.hi, i) * m(i) / m(0);
}

std::vector<double> model_raw_moments(const FittedModel& model, int count) {
  const Eigen::ArrayXd m = kernel_moments(model.params, model.support.lo / model.support.hi, count);
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back((1.0 - model.p0) * std::pow(model.support.hi, i) * m(i) / m(0));
  return out;
}

double mtl_series_integral(double gamma, double mu, double b, double lo, double hi) {
  const double a = gamma + 1.0;
  // Antiderivative of s^(a-1) e^s (no scaling): sum_k s^(a+k) / (k! (a+k)), times e^-shift.
  auto rising = [a](double s, double shift) {
    double term = std::pow(s, a) * std::exp(-shift);
    double sum = term / a;
    for (int k = 1; k < 100000; ++k) {
      term *= s / k;
      const double add = term / (a + k);
      sum += add;
      if (k > s && std::abs(add) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  };
  // Antiderivative of s^(a-1) e^-s: -s^a e^-s sum_k s^k / (a)_(k+1), times e^shift.
  auto falling = [a](double s, double shift) {
    double term = std::pow(s, a) * std::exp(shift - s) / a;
    double sum = term;
    for (int k = 1; k < 100000; ++k) {
      term *= s / (a + k);
      sum += term;
      if (k > s && std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  };
  const double scale = std::pow(b, a);
  const double m = mu / b;
  double total = 0.0;
  if (lo < mu) {
    const double top = std::min(mu, hi);
    total += scale * (rising(top / b, m) - rising(lo / b, m));
  }
  if (hi > mu) {
    const double bottom = std::max(mu, lo);
    total += scale * (falling(hi / b, m) - falling(bottom / b, m));
  }
  return total;
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct ParamCodec {
  ModelTag tag;
  double x_lo;

  int size() const { return matched_moment_count(tag) == 3 ? 3 : 9; }

  static double nu(double z) { return std::exp(std::clamp(z, -16.0, 3.0)); }
  static double scale(double z) { return std::exp(std::clamp(z, -12.0, 3.0)); }
  static double shape(double z) { return std::exp(std::clamp(z, std::log(0.05), std::log(500.0))); }
  double location(double z) const { return x_lo + (1.0 - x_lo) * logistic(std::clamp(z, -30.0, 30.0)); }
  double location_code(double x) const {
    return logit(std::clamp((x - x_lo) / (1.0 - x_lo), 1e-6, 1.0 - 1e-6));
  }

  ModelParams decode(const Eigen::VectorXd& z) const {
    switch (tag) {
      case ModelTag::MTL: return MtlParams{nu(z(0)), location(z(1)), scale(z(2))};
      case ModelTag::MB: return MbParams{nu(z(0)), shape(z(1)), shape(z(2))};
      case ModelTag::SMTG: {
        SmtgParams p;
        for (int j = 0; j < 3; ++j) p.components[j] = {nu(z(3 * j)), location(z(3 * j + 1)), scale(z(3 * j + 2))};
        return p;
      }
      default: {
        SmbParams p;
        for (int j = 0; j < 3; ++j) p.components[j] = {nu(z(3 * j)), shape(z(3 * j + 1)), shape(z(3 * j + 2))};
        return p;
      }
    }
  }

  // Box from which the random starts are drawn.
  std::pair<double, double> start_box(int index) const {
    const int role = index % 3;
    if (role == 0) return {std::log(0.02), std::log(3.0)};
    if (tag == ModelTag::MTL || tag == ModelTag::SMTG) {
      if (role == 1) return {-2.5, 2.5};
      return {std::log(0.01), std::log(0.5)};
    }
    return {std::log(0.3), std::log(8.0)};
  }

  // Start derived from the mean and spread of the target moments.
  Eigen::VectorXd moment_start(double mean, double sd) const {
    Eigen::VectorXd z(size());
    const double nu0 = std::log(0.3);
    const double m = std::clamp((mean - x_lo) / (1.0 - x_lo), 0.05, 0.95);
    const double v = std::max(sd * sd / ((1.0 - x_lo) * (1.0 - x_lo)), 1e-6);
    const double common = std::max(m * (1.0 - m) / v - 1.0, 0.5);
    switch (tag) {
      case ModelTag::MTL:
        z << nu0, location_code(mean), std::log(std::max(sd / std::sqrt(2.0), 1e-4));
        break;
      case ModelTag::MB:
        z << nu0, std::log(m * common), std::log((1.0 - m) * common);
        break;
      case ModelTag::SMTG:
        for (int j = 0; j < 3; ++j) {
          z(3 * j) = nu0;
          z(3 * j + 1) = location_code(mean + (j - 1) * sd);
          z(3 * j + 2) = std::log(std::max(sd / 1.5, 1e-4));
        }
        break;
      case ModelTag::SMB: {
        const double spread[3] = {0.5, 1.0, 2.0};
        for (int j = 0; j < 3; ++j) {
          z(3 * j) = nu0;
          z(3 * j + 1) = std::log(m * common * spread[j]);
          z(3 * j + 2) = std::log((1.0 - m) * common * spread[j]);
        }
        break;
      }
    }
    return z;
  }
};

}  // namespace

FittedModel fit_by_moments(const Scenario& s, ModelTag tag, std::span<const double> moments, double p0,
                           const FitOptions& options) {
  const int count = matched_moment_count(tag);
  if (static_cast<int>(moments.size()) < count)
    throw DomainError(to_string(tag) + " fit needs " + std::to_string(count) + " moments");
  if (!(p0 >= 0 && p0 < 1)) throw DomainError("outage mass must lie in [0, 1)");
  if (options.starts < 0) throw DomainError("start count must be nonnegative");
  const int start_count = options.starts > 0 ? options.starts : (count == 3 ? 8 : 12);
  const ModelSupport support = fit_support(s, options.support_floor);
  const double h_max = support.hi;
  const ParamCodec codec{tag, support.lo / h_max};

  Eigen::ArrayXd target(count);
  for (int i = 1; i <= count; ++i) {
    const double m = moments[static_cast<std::size_t>(i - 1)];
    if (!(m > 0) || !std::isfinite(m)) throw DomainError("target moments must be positive and finite");
    target(i - 1) = m / (1.0 - p0) / std::pow(h_max, i);
  }

  auto residual_of = [&](const ModelParams& params) {
    try {
      const Eigen::ArrayXd k = kernel_moments(params, codec.x_lo, count);
      if (!(k(0) > 0)) return std::numeric_limits<double>::infinity();
      const Eigen::ArrayXd ratio = k.tail(count) / k(0) / target - 1.0;
      return ratio.square().sum();
    } catch (const QuadratureError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const double mean = target(0);
  const double sd = std::sqrt(std::max(target(1) - mean * mean, 1e-12));
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(codec.moment_start(mean, sd));
  for (int k = 1; k < start_count; ++k) {
    RandomStream stream = RandomStream::substream(0x51ed5eedULL, static_cast<std::uint64_t>(k));
    Eigen::VectorXd z(codec.size());
    for (int i = 0; i < codec.size(); ++i) {
      const auto [lo, hi] = codec.start_box(i);
      z(i) = lo + (hi - lo) * stream.uniform();
    }
    starts.push_back(z);
  }

  SimplexOptions simplex = options.simplex;
  if (simplex.max_evaluations <= 0) simplex.max_evaluations = count == 3 ? 3000 : 12000;
  std::vector<SimplexResult> results(starts.size());
  parallel_for(starts.size(), options.workers, [&](std::size_t k) {
    results[k] = nelder_mead([&](const Eigen::VectorXd& z) { return residual_of(codec.decode(z)); }, starts[k],
                             simplex);
  });

  std::size_t best = 0;
  std::vector<double> trace;
  for (std::size_t k = 0; k < results.size(); ++k) {
    trace.push_back(results[k].value);
    if (results[k].value < results[best].value) best = k;
  }
  if (!std::isfinite(results[best].value))
    throw FitError(to_string(tag) + " fit found no admissible parameters", trace);

  FittedModel model;
  model.params = codec.decode(results[best].x);
  model.p0 = p0;
  model.support = support;
  model.residual = results[best].value;
  model.converged = model.residual < options.target_residual;
  for (int i = 1; i <= count; ++i) model.matched_moments.push_back(target(i - 1) * std::pow(h_max, i));
  model.start_residuals = std::move(trace);
  return model;
}

GainLaw model_law(const FittedModel& model, int nodes) {
  if (nodes < 16) throw DomainError("model table needs at least 16 nodes");
  const double hi = model.support.hi;
  const double x_lo = model.support.lo / hi;
  const ModelParams& params = model.params;

  std::vector<double> keys{x_lo};
  for (const auto& piece : kernel_pieces(params, x_lo, x_lo, 1.0)) {
    if (piece.b < 1.0) keys.push_back(piece.b);
  }
  keys.push_back(1.0);
  std::vector<double> xs{x_lo};
  for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
    const int count = std::max(9, static_cast<int>(std::lround(nodes * (keys[k + 1] - keys[k]) / (1.0 - x_lo))) + 1);
    const auto seg = clustered_nodes(keys[k], keys[k + 1], count);
    xs.insert(xs.end(), seg.begin() + 1, seg.end());
  }

  auto unit = [](double) { return 1.0; };
  std::vector<double> cumulative(xs.size(), 0.0);
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const auto res = integrate_kernel<double>(params, x_lo, kernel_pieces(params, x_lo, xs[k], xs[k + 1]), unit,
                                              kTableSpec);
    cumulative[k + 1] = cumulative[k] + res.value;
  }
  const double total = cumulative.back();
  if (!(total > 0) || !std::isfinite(total)) throw DomainError("model kernel is not integrable");
  const double norm = hi * total / (1.0 - model.p0);

  std::vector<double> h(xs.size()), pdf(xs.size()), cdf(xs.size());
  const double nudge = 1e-9 * (1.0 - x_lo);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    h[k] = xs[k] * hi;
    // Beta kernels may be infinite at the support ends; tabulate just inside.
    const double xe = std::clamp(xs[k], x_lo + nudge, 1.0 - nudge);
    pdf[k] = model_kernel(params, xe, x_lo) / norm;
    cdf[k] = model.p0 + (1.0 - model.p0) * cumulative[k] / total;
  }
  h.front() = model.support.lo;
  h.back() = hi;
  cdf.back() = 1.0;
  auto density = [params, x_lo, hi, norm](double g) { return model_kernel(params, g / hi, x_lo) / norm; };
  return GainLaw(model.p0, {model.support.lo, hi}, GainLaw::Provenance::Fitted, "fitted:" + to_string(model.tag()),
                 std::move(h), std::move(pdf), std::move(cdf), density);
}

}  // namespace lifi
