#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lifi/gain_law.hpp"
#include "lifi/quadrature.hpp"
#include "lifi/scenario.hpp"
#include "lifi/simplex.hpp"

namespace lifi {

/// Approximate gain-law families. MTL and MB target stationary users, SMTG
/// and SMB mobile users.
enum class ModelTag { MTL, MB, SMTG, SMB };

std::string to_string(ModelTag tag);
ModelTag model_tag_from_string(const std::string& text);
/// Number of moments matched by a fit of this family (3 or 9).
int matched_moment_count(ModelTag tag);
/// Activity the family was designed for.
MobilityMode intended_mode(ModelTag tag);

// Every model is expressed in the normalized gain x = h / h_max, so location
// and scale parameters below are fractions of h_max and the h^-nu factor reads
// x^-nu.

/// x^-nu exp(-|x - mu| / b)
struct MtlParams {
  double nu;
  double mu;
  double b;
  bool operator==(const MtlParams&) const = default;
};

/// x^-nu ((x - lo)/(1 - lo))^(alpha - 1) ((1 - x)/(1 - lo))^(beta - 1)
struct MbParams {
  double nu;
  double alpha;
  double beta;
  bool operator==(const MbParams&) const = default;
};

struct SmtgComponent {
  double nu;
  double mu;
  double sigma;
  bool operator==(const SmtgComponent&) const = default;
};

/// Sum over three components of x^-nu_j exp(-(x - mu_j)^2 / (2 sigma_j^2)).
struct SmtgParams {
  std::array<SmtgComponent, 3> components;
  bool operator==(const SmtgParams&) const = default;
};

/// Sum over three MB kernels.
struct SmbParams {
  std::array<MbParams, 3> components;
  bool operator==(const SmbParams&) const = default;
};

using ModelParams = std::variant<MtlParams, MbParams, SmtgParams, SmbParams>;

ModelTag tag_of(const ModelParams& params);

/// Continuous support of a model in gain units; hi is h_max and sets the
/// normalization x = h / hi.
struct ModelSupport {
  double lo;
  double hi;
  bool operator==(const ModelSupport&) const = default;
};

/// Support used for fitting: [max(h*_min, floor_fraction * h_max), h_max].
ModelSupport fit_support(const Scenario& s, double floor_fraction = 1e-4);

struct FittedModel {
  ModelParams params;
  double p0 = 0.0;
  ModelSupport support{};
  double residual = 0.0;
  bool converged = true;
  /// Conditional raw moments (gain units) the fit was asked to match.
  std::vector<double> matched_moments;
  /// Best residual after each start, in start order.
  std::vector<double> start_residuals;

  ModelTag tag() const { return tag_of(params); }
};

/// Unnormalized kernel at normalized gain x inside [x_lo, 1].
double model_kernel(const ModelParams& params, double x, double x_lo);

/// Integrals of x^i times the kernel over [x_lo, 1] for i = 0..max_order.
/// Throws QuadratureError when the adaptive rule does not converge.
Eigen::ArrayXd kernel_moments(const ModelParams& params, double x_lo, int max_order,
                              const QuadratureSpec& spec = {1e-11, 1e-300, 30});

/// Normalization M (gain units) such that kernel(h / h_max) / M integrates to 1 - p0.
double normalization(const ModelParams& params, const ModelSupport& support, double p0);

/// Continuous density of the model at gain h; zero outside the support.
double model_pdf(const FittedModel& model, double h);

/// i-th raw moment of the continuous part conditioned on H > 0, gain units.
double model_moments(const FittedModel& model, int i);

/// Integral of x^gamma exp(-|x - mu| / b) over [lo, hi] by termwise
/// incomplete-gamma series. Valid away from gamma + 1 in {0, -1, ...} and for
/// moderate hi / b; used to cross-check the quadrature.
double mtl_series_integral(double gamma, double mu, double b, double lo, double hi);

struct FitOptions {
  int starts = 0;  // 0: 8 for three-parameter families, 12 for nine
  unsigned workers = 1;
  double target_residual = 1e-8;
  SimplexOptions simplex{0.5, 1e-16, 1e-11, 0, 3};  // max_evaluations 0: chosen per family
  double support_floor = 1e-4;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Moment-matching fit. `moments` are the raw moments m_1..m_K of the gain with
/// the atom at zero excluded (the values returned by exact_moments); p0 is the
/// outage mass, carried into the model unchanged. Minimizes the sum over
/// matched orders of (m_i^model / m_i^target - 1)^2 on conditional moments.
FittedModel fit_by_moments(const Scenario& s, ModelTag tag, std::span<const double> moments, double p0,
                           const FitOptions& options = {});

/// Unconditional raw moments m_1..m_K (atom excluded) generated by a model;
/// the inverse of what fit_by_moments consumes.
std::vector<double> model_raw_moments(const FittedModel& model, int count);

/// Tabulated law of a fitted model; the density is evaluated directly.
GainLaw model_law(const FittedModel& model, int nodes = 400);

}  // namespace lifi
