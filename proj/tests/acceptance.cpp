// Acceptance run: one PASS/FAIL line per criterion, details indented below.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "lifi/channel.hpp"
#include "lifi/exact_stats.hpp"
#include "lifi/fitted_models.hpp"
#include "lifi/parallel.hpp"
#include "lifi/performance.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace lifi;
using namespace lifi::testing;

namespace {

constexpr double kSigma = 1e-8;
const unsigned kWorkers = default_workers();
int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
void note(const char* fmt, Args... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

FittedModel fit(const ExactGainLaw& law, ModelTag tag) {
  const int count = matched_moment_count(tag);
  const auto nm = law.normalized_moments(count);
  std::vector<double> m;
  for (int i = 1; i <= count; ++i) m.push_back(nm(i) * std::pow(law.support_hi(), i));
  FitOptions opt;
  opt.workers = kWorkers;
  return fit_by_moments(law.scenario(), tag, m, law.outage(), opt);
}

// Printed KSD values, indexed like kTableCases within each activity:
// R=1 90, R=1 60, R=2.5 90, R=2.5 60.
struct Printed {
  ModelTag tag;
  std::array<double, 4> ksd;
};
const Printed kStationaryPrinted[] = {{ModelTag::MTL, {0.0669, 0.0448, 0.0239, 0.0241}},
                                      {ModelTag::MB, {0.0336, 0.0197, 0.0444, 0.0316}}};
const Printed kMobilePrinted[] = {{ModelTag::SMTG, {0.0082, 0.0037, 0.0238, 0.0156}},
                                  {ModelTag::SMB, {0.0048, 0.0030, 0.0054, 0.0047}}};

void fitted_criterion(int id, MobilityMode mode, const Printed (&printed)[2], double cap, double factor) {
  int within = 0, cells = 0;
  bool capped = true;
  for (int k = 0; k < 4; ++k) {
    const TableCase& c = kTableCases[(mode == MobilityMode::Stationary ? 0 : 4) + k];
    const Scenario s = c.scenario();
    const ExactGainLaw law(s);
    const EmpiricalCdf emp(sample_gains(s, 1'000'000, 5000 + 10 * id + k, kWorkers));
    for (const Printed& p : printed) {
      const FittedModel m = fit(law, p.tag);
      const double d = ksd(model_law(m), emp, emp.sorted());
      const bool in = d <= factor * p.ksd[k];
      within += in;
      ++cells;
      capped = capped && d <= cap;
      note("%-4s %-24s KSD %.4f (printed %.4f, ratio %.2f) residual %.1e%s", to_string(p.tag).c_str(),
             c.name().c_str(), d, p.ksd[k], d / p.ksd[k], m.residual, in ? "" : "  above factor");
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s fits: all KSD <= %.2f (%s), %d of %d cells within %gx printed (need 6)",
                to_string(mode).c_str(), cap, capped ? "yes" : "no", within, cells, factor);
  verdict(id, capped && within >= 6, buf);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  std::printf("acceptance run, %u worker(s)\n", kWorkers);

  // 1. Exact CDF against simulation.
  {
    bool ok = true;
    double worst = 0;
    for (std::size_t i = 0; i < kTableCases.size(); ++i) {
      const Scenario s = kTableCases[i].scenario();
      const GainLaw table = tabulate_law(ExactGainLaw(s), 512, kWorkers);
      const EmpiricalCdf emp(sample_gains(s, 1'000'000, 100 + i, kWorkers));
      const double d = ksd(table, emp, emp.sorted());
      worst = std::max(worst, d);
      ok = ok && d < 0.01;
      note("%-24s KSD %.5f", kTableCases[i].name().c_str(), d);
    }
    verdict(1, ok, "exact CDF vs 1e6 Monte Carlo draws, KSD < 0.01 in all 8 scenarios (worst " +
                       std::to_string(worst) + ")");
  }

  // 2. Normalization by an independent integrator.
  {
    bool ok = true;
    double worst = 0;
    for (const auto& c : kTableCases) {
      const ExactGainLaw law(c.scenario());
      const auto keys = law.key_gains();
      double total = law.outage();
      for (std::size_t k = 0; k + 1 < keys.size(); ++k)
        total += ts_integral([&](double h) { return law.pdf(h); }, keys[k], keys[k + 1], 1e-6);
      worst = std::max(worst, std::abs(total - 1));
      ok = ok && std::abs(total - 1) <= 1e-4;
      note("%-24s p0 %.6f  p0 + integral %.9f", c.name().c_str(), law.outage(), total);
    }
    verdict(2, ok, "p0 + integral of pdf = 1 within 1e-4 (worst deviation " + std::to_string(worst) + ")");
  }

  // 3. Outage against 1e7 draws.
  {
    bool ok = true;
    for (double radius : {1.0, 2.5}) {
      const Scenario s = Scenario::reference(MobilityMode::Stationary, radius, deg_to_rad(60.0));
      const double p0 = outage_probability(s);
      const auto set = sample_gains(s, 10'000'000, 300 + static_cast<int>(radius * 10), kWorkers);
      const double sd = std::sqrt(p0 * (1 - p0) / set.n_total);
      const double z = (set.outage_frequency() - p0) / sd;
      ok = ok && std::abs(z) <= 3;
      note("stationary R=%g FOV=60: p0 %.6f, frequency %.6f, z %.2f", radius, p0, set.outage_frequency(), z);
    }
    verdict(3, ok, "outage within 3 binomial sigma at n = 1e7 (stationary, 60 deg)");
  }

  // 4 and 5. Fitted families against simulation.
  fitted_criterion(4, MobilityMode::Stationary, kStationaryPrinted, 0.10, 2.0);
  fitted_criterion(5, MobilityMode::Mobile, kMobilePrinted, 0.05, 3.0);

  // 6. High-power OOK limit.
  {
    bool ok = true;
    for (const auto& c : kTableCases) {
      const ExactGainLaw law(c.scenario());
      // With h*_min = 0 (90 deg) the condition h*_min P / sigma > 40 cannot
      // hold; use h_max P / sigma = 1e8 instead.
      const bool edge = law.support_lo() > 0;
      const double p = edge ? 50 * kSigma / law.support_lo() : 1e8 * kSigma / law.support_hi();
      const double ber = average_ber(law, p, kSigma, 2);
      const double gap = std::abs(ber - 0.5 * law.outage());
      ok = ok && gap <= 1e-6;
      note("%-24s %s: BER %.9f, p0/2 %.9f, gap %.1e", c.name().c_str(),
             edge ? "h*min P/sigma = 50" : "h_max P/sigma = 1e8", ber, 0.5 * law.outage(), gap);
    }
    verdict(6, ok, "OOK average BER at high power equals p0/2 within 1e-6");
  }

  // 7. Exact BER against 1e7 draws.
  {
    bool ok = true;
    double worst = 0;
    std::vector<double> powers;
    for (int k = 0; k < 10; ++k) powers.push_back(-20.0 + 5.0 * k);
    for (std::size_t i = 0; i < kTableCases.size(); ++i) {
      const Scenario s = kTableCases[i].scenario();
      const ExactGainLaw law(s);
      const auto set = sample_gains(s, 10'000'000, 700 + i, kWorkers);
      const auto mc = montecarlo_ber(set.gains, powers, kSigma, 2, kWorkers);
      double case_worst = 0;
      for (std::size_t j = 0; j < powers.size(); ++j) {
        const double e = average_ber(law, dbm_to_watts(powers[j]), kSigma, 2);
        const double z = mc[j].std_error > 0 ? (e - mc[j].mean) / mc[j].std_error : 0.0;
        case_worst = std::max(case_worst, std::abs(z));
      }
      worst = std::max(worst, case_worst);
      ok = ok && case_worst <= 3;
      note("%-24s worst |z| over 10 powers %.2f", kTableCases[i].name().c_str(), case_worst);
    }
    verdict(7, ok, "exact BER within 3 sigma of 1e7-draw Monte Carlo at 10 powers (worst |z| " +
                       std::to_string(worst) + ")");
  }

  // 8. Five-AP layout, paired with the single cell on the same user states.
  {
    const Scenario s = Scenario::reference(MobilityMode::Stationary, 1.0, deg_to_rad(60.0));
    const MulticellLayout layout{1.0, 1.0};
    const Scenario cell = multicell_scenario(s, layout);
    const StateSampler sampler(cell);
    const LinkGeometry geom(cell);
    const std::size_t n = 1'000'000;
    std::vector<double> multi(n), single(n);
    for_each_chunk(n, kWorkers, [&](std::size_t k, std::size_t begin, std::size_t end) {
      RandomStream stream = RandomStream::substream(808, k);
      for (std::size_t i = begin; i < end; ++i) {
        const UeState st = sampler(stream);
        multi[i] = multicell_gain(st, layout, geom);
        single[i] = los_gain(st, geom);
      }
    });
    const double floor = ber_floor(s, 2);
    std::vector<double> powers;
    for (int k = 0; k <= 25; ++k) powers.push_back(-20.0 + 2.0 * k);
    const auto m = montecarlo_ber(multi, powers, kSigma, 2, kWorkers);
    const auto o = montecarlo_ber(single, powers, kSigma, 2, kWorkers);
    bool lower = true;
    double best = 1.0;
    for (std::size_t j = 0; j < powers.size(); ++j) {
      lower = lower && m[j].mean < o[j].mean;
      best = std::min(best, m[j].mean);
      if (j % 5 == 0) note("%5.0f dBm: five APs %.4e, single cell %.4e", powers[j], m[j].mean, o[j].mean);
    }
    note("single-cell floor %.4e, lowest five-AP BER %.4e", floor, best);
    const bool target = floor > 3.8e-3 && best <= 3.8e-3;
    verdict(8, lower && target,
            std::string("stationary 60 deg, (R_c, D_c) = (1, 1): five-AP BER below single cell at every power (") +
                (lower ? "yes" : "no") + ") and reaches 3.8e-3 where the single-cell floor cannot (" +
                (target ? "yes" : "no") + ")");
  }

  // 9. Randomized property suites.
  {
    const PropertyReport dist = distribution_properties(1000, 9001);
    const PropertyReport gain = gain_form_equivalence(1000, 100, 9002);
    note("distribution properties: %d cases, %d failures %s", dist.cases, dist.failures,
           dist.first_failure.c_str());
    note("gain-form equivalence: %d cases x 100 states, %d failures %s", gain.cases, gain.failures,
           gain.first_failure.c_str());
    verdict(9, dist.ok() && gain.ok() && dist.cases == 1000 && gain.cases == 1000,
            "distribution and gain-form property suites over 1e3 randomized cases");
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criterion failure(s), %.0f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
