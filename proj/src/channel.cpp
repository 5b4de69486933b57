#include "lifi/channel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "lifi/parallel.hpp"

namespace lifi {

double incidence_cosine(const UeState& st, const LinkGeometry& g) {
  const double d = std::sqrt(st.r * st.r + g.dh * g.dh);
  return (st.r * std::cos(st.omega - st.alpha) * std::sin(st.theta) + g.dh * std::cos(st.theta)) / d;
}

double incidence_cosine(const UeState& state, const Scenario& s) {
  return incidence_cosine(state, LinkGeometry(s));
}

double los_gain(const UeState& st, const LinkGeometry& g) {
  const double d2 = st.r * st.r + g.dh * g.dh;
  const double d = std::sqrt(d2);
  const double sin_t = std::sin(st.theta);
  const double cos_t = std::cos(st.theta);
  const double cos_dir = std::cos(st.omega - st.alpha);
  const double cos_psi = (st.r * cos_dir * sin_t + g.dh * cos_t) / d;
  if (!(cos_psi > g.cos_fov)) return 0.0;
  const double a = g.c * sin_t;
  const double b = g.c * g.dh * cos_t;
  return (a * st.r * cos_dir + b) / std::pow(d, g.m + 3.0);
}

double los_gain(const UeState& state, const Scenario& s) { return los_gain(state, LinkGeometry(s)); }

StateSampler::StateSampler(const Scenario& s)
    : radial_(radial_law(s), s.cell.attocell_radius), orientation_(orientation_law(s)) {}

UeState StateSampler::operator()(RandomStream& stream) const {
  UeState st;
  st.r = radial_.quantile(stream.uniform());
  st.alpha = stream.angle();
  st.omega = stream.angle();
  st.theta = orientation_sample(orientation_, stream);
  return st;
}

void for_each_chunk(std::size_t n, unsigned workers,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, workers, [&](std::size_t k) {
    const std::size_t begin = k * kSampleChunk;
    body(k, begin, std::min(n, begin + kSampleChunk));
  });
}

std::vector<UeState> sample_states(const Scenario& s, std::size_t n, std::uint64_t seed) {
  validate(s);
  if (n == 0) throw DomainError("sample count must be positive");
  const StateSampler sampler(s);
  std::vector<UeState> out(n);
  for_each_chunk(n, 1, [&](std::size_t k, std::size_t begin, std::size_t end) {
    RandomStream stream = RandomStream::substream(seed, k);
    for (std::size_t i = begin; i < end; ++i) out[i] = sampler(stream);
  });
  return out;
}

GainSampleSet sample_gains(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers) {
  validate(s);
  if (n == 0) throw DomainError("sample count must be positive");
  if (workers == 0) throw DomainError("worker count must be at least 1");
  const StateSampler sampler(s);
  const LinkGeometry geom(s);

  GainSampleSet set;
  set.gains.resize(n);
  for_each_chunk(n, workers, [&](std::size_t k, std::size_t begin, std::size_t end) {
    RandomStream stream = RandomStream::substream(seed, k);
    for (std::size_t i = begin; i < end; ++i) set.gains[i] = los_gain(sampler(stream), geom);
  });
  set.n_total = n;
  set.n_outage = static_cast<std::size_t>(std::count(set.gains.begin(), set.gains.end(), 0.0));
  set.seed = seed;
  set.scenario_digest = scenario_digest(s);
  return set;
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  if (sorted_.empty()) throw DomainError("empirical CDF needs at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::cdf(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::cdf_left(double x) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(const GainSampleSet& set) { return EmpiricalCdf(set); }

}  // namespace lifi
