#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lifi/distributions.hpp"
#include "lifi/scenario.hpp"

namespace lifi {

/// One realization of the user position (r, alpha) and device orientation
/// (Omega, theta).
struct UeState {
  double r;
  double alpha;
  double omega;
  double theta;
};

double incidence_cosine(const UeState& state, const LinkGeometry& geom);
double incidence_cosine(const UeState& state, const Scenario& s);

/// LOS channel gain; exactly zero when the AP falls outside the field of view
/// (strict inequality cos(psi) > cos(FOV)).
double los_gain(const UeState& state, const LinkGeometry& geom);
double los_gain(const UeState& state, const Scenario& s);

/// Draws of (r, alpha, Omega, theta) are made in chunks of this size, each from
/// its own substream, so results do not depend on the worker count.
inline constexpr std::size_t kSampleChunk = 1 << 16;

/// Independent draws of the user state for the scenario's activity.
std::vector<UeState> sample_states(const Scenario& s, std::size_t n, std::uint64_t seed);

/// Samples a user state from stream using prebuilt laws.
class StateSampler {
 public:
  explicit StateSampler(const Scenario& s);
  UeState operator()(RandomStream& stream) const;

 private:
  TruncatedRadial radial_;
  OrientationLaw orientation_;
};

struct GainSampleSet {
  std::vector<double> gains;
  std::size_t n_total = 0;
  std::size_t n_outage = 0;
  std::uint64_t seed = 0;
  std::string scenario_digest;

  bool operator==(const GainSampleSet&) const = default;

  double outage_frequency() const {
    return n_total ? static_cast<double>(n_outage) / static_cast<double>(n_total) : 0.0;
  }
};

GainSampleSet sample_gains(const Scenario& s, std::size_t n, std::uint64_t seed,
                           unsigned workers = 1);

/// Runs `body(chunk_index, begin, end)` over [0, n) in kSampleChunk pieces on
/// `workers` threads. Chunk boundaries are fixed, so any per-chunk state seeded
/// from the chunk index yields worker-count-invariant results.
void for_each_chunk(std::size_t n, unsigned workers,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Right-continuous step CDF of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> values);
  explicit EmpiricalCdf(const GainSampleSet& set) : EmpiricalCdf(std::span<const double>(set.gains)) {}

  double cdf(double x) const;
  /// Limit from the left, P(X < x).
  double cdf_left(double x) const;

  const std::vector<double>& sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(const GainSampleSet& set);

}  // namespace lifi
