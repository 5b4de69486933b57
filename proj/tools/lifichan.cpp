// Command-line front end: sample, exact, fit, ber, multicell, config.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "lifi/channel.hpp"
#include "lifi/exact_stats.hpp"
#include "lifi/fitted_models.hpp"
#include "lifi/format.hpp"
#include "lifi/io.hpp"
#include "lifi/parallel.hpp"
#include "lifi/performance.hpp"

namespace fs = std::filesystem;
using namespace lifi;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = default_workers();
};

void diagnostic(const char* kind, const std::string& message, const std::vector<double>& trace = {}) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!trace.empty()) j["residual_trace"] = trace;
  std::cerr << j.dump() << "\n";
}

RunConfig load(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? parse_config("") : load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

fs::path output_dir(const Globals& g) {
  const fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

void emit(const fs::path& path, const std::string& text) {
  write_text(path, text);
  std::cout << path.string() << "\n";
}

ModelTag resolve_model(const RunConfig& cfg) {
  const MobilityMode mode = cfg.scenario.mode;
  const ModelTag tag = cfg.model.value_or(mode == MobilityMode::Stationary ? ModelTag::MB : ModelTag::SMB);
  if (intended_mode(tag) != mode && !cfg.allow_mode_mismatch)
    throw UsageError(to_string(tag) + " targets " + to_string(intended_mode(tag)) + " users but the scenario is " +
                     to_string(mode) + " (pass --allow-mode-mismatch to override)");
  return tag;
}

FittedModel fit_scenario(const RunConfig& cfg, ModelTag tag, unsigned workers) {
  const ExactGainLaw law(cfg.scenario);
  const int count = matched_moment_count(tag);
  const auto nm = law.normalized_moments(count);
  std::vector<double> moments;
  for (int i = 1; i <= count; ++i) moments.push_back(nm(i) * std::pow(law.geometry().h_max, i));
  FitOptions options;
  options.workers = workers;
  return fit_by_moments(cfg.scenario, tag, moments, law.outage(), options);
}

int cmd_sample(const Globals& g, std::optional<std::size_t> samples) {
  RunConfig cfg = load(g);
  if (samples) cfg.samples = *samples;
  if (cfg.samples == 0) throw UsageError("sample count must be positive");
  const fs::path dir = output_dir(g);
  const GainSampleSet set = sample_gains(cfg.scenario, cfg.samples, cfg.seed, g.workers);
  emit(dir / "samples.csv", samples_csv(set));
  emit(dir / "samples_summary.json", samples_summary_json(set));
  return kOk;
}

int cmd_exact(const Globals& g, std::optional<int> grid) {
  RunConfig cfg = load(g);
  if (grid) cfg.grid_size = *grid;
  if (cfg.grid_size < 64) throw UsageError("grid size must be at least 64");
  const fs::path dir = output_dir(g);
  const QuadratureSpec spec;
  const ExactGainLaw law(cfg.scenario, spec);
  emit(dir / "exact_law.csv", law_csv(tabulate_law(law, cfg.grid_size, g.workers), scenario_digest(cfg.scenario), spec));
  return kOk;
}

int cmd_fit(const Globals& g, std::optional<std::string> model, bool mismatch, std::optional<std::size_t> ksd_n) {
  RunConfig cfg = load(g);
  if (model) {
    try {
      cfg.model = model_tag_from_string(*model);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  if (mismatch) cfg.allow_mode_mismatch = true;
  if (ksd_n) cfg.ksd_samples = *ksd_n;
  if (cfg.ksd_samples == 0) throw UsageError("KSD sample count must be positive");
  const ModelTag tag = resolve_model(cfg);
  const fs::path dir = output_dir(g);
  const FittedModel fit = fit_scenario(cfg, tag, g.workers);
  const GainLaw law = model_law(fit);
  const GainSampleSet set = sample_gains(cfg.scenario, cfg.ksd_samples, cfg.seed, g.workers);
  const EmpiricalCdf ecdf(set);
  const double d = ksd(law, ecdf, ecdf.sorted());
  emit(dir / ("fit_" + to_string(tag) + ".json"),
       fitted_model_json(fit, scenario_digest(cfg.scenario), d, cfg.ksd_samples, cfg.seed));
  std::cout << "KSD " << format_double(d) << " residual " << format_double(fit.residual)
            << (fit.converged ? "" : " (not converged)") << "\n";
  return kOk;
}

int cmd_ber(const Globals& g, std::optional<std::string> source, std::optional<std::string> fit_path,
            std::optional<std::string> powers, std::optional<int> order, bool mismatch) {
  RunConfig cfg = load(g);
  if (mismatch) cfg.allow_mode_mismatch = true;
  if (source) {
    RunConfig probe = parse_config("[run]\nsource = " + *source + "\n");
    cfg.ber_source = probe.ber_source;
  }
  if (powers) cfg.powers_dbm = parse_number_list(*powers);
  if (order) {
    if (*order < 2) throw UsageError("PAM order must be at least 2");
    cfg.pam_order = *order;
  }
  if (cfg.powers_dbm.empty()) throw UsageError("power sweep is empty");
  const fs::path dir = output_dir(g);

  BerCurve curve;
  if (cfg.ber_source == "exact") {
    curve = ber_curve(ExactGainLaw(cfg.scenario), cfg.powers_dbm, cfg.noise_sigma, cfg.pam_order);
  } else if (cfg.ber_source == "montecarlo") {
    const GainSampleSet set = sample_gains(cfg.scenario, cfg.samples, cfg.seed, g.workers);
    curve = montecarlo_ber_curve(set, cfg.powers_dbm, cfg.noise_sigma, cfg.pam_order, g.workers);
  } else {
    const ModelTag tag = model_tag_from_string(cfg.ber_source.substr(7));
    FittedModel fit;
    if (fit_path) {
      fit = fitted_model_from_json(read_text(*fit_path));
      if (fit.tag() != tag) throw UsageError("fit file holds " + to_string(fit.tag()) + ", source asks for " + to_string(tag));
    } else {
      cfg.model = tag;
      fit = fit_scenario(cfg, resolve_model(cfg), g.workers);
    }
    curve = ber_curve(model_law(fit), cfg.powers_dbm, cfg.noise_sigma, cfg.pam_order);
  }
  curve.scenario_digest = scenario_digest(cfg.scenario);
  emit(dir / "ber.csv", ber_curve_csv(curve));
  return kOk;
}

int cmd_multicell(const Globals& g, std::optional<std::string> radii, std::optional<std::string> spacings,
                  std::optional<double> target, std::optional<std::string> powers) {
  RunConfig cfg = load(g);
  if (powers) cfg.powers_dbm = parse_number_list(*powers);
  if (radii) cfg.cell_radii = parse_number_list(*radii);
  if (spacings) cfg.spacings = parse_number_list(*spacings);
  if (target) cfg.target_ber = *target;
  if (cfg.cell_radii.empty() || cfg.spacings.empty()) throw UsageError("cell radius and spacing grids must be nonempty");
  if (cfg.powers_dbm.empty()) throw UsageError("power sweep is empty");
  if (cfg.samples < 100'000) throw UsageError("multicell BER needs at least 1e5 samples");
  const fs::path dir = output_dir(g);

  std::vector<double> sweep = cfg.powers_dbm;
  sweep.push_back(cfg.reference_power_dbm);
  std::string curves = "# format_version=" + std::to_string(kFormatVersion) + " scenario=" +
                       scenario_digest(cfg.scenario) + " M=" + std::to_string(cfg.pam_order) +
                       " sigma=" + format_double(cfg.noise_sigma) + "\nR_c,D_c,P_opt_dBm,ber,std_error\n";
  std::string summary = "# target_ber=" + format_double(cfg.target_ber) +
                        " reference_power_dbm=" + format_double(cfg.reference_power_dbm) +
                        "\nR_c,D_c,ber_at_reference,single_cell_ber_at_reference,single_cell_floor,meets_target\n";
  for (double rc : cfg.cell_radii) {
    for (double dc : cfg.spacings) {
      const MulticellLayout layout{rc, dc};
      const Scenario cell = multicell_scenario(cfg.scenario, layout);
      const auto gains = sample_multicell_gains(layout, cfg.scenario, cfg.samples, cfg.seed, g.workers);
      const auto est = montecarlo_ber(gains, sweep, cfg.noise_sigma, cfg.pam_order, g.workers);
      for (std::size_t j = 0; j + 1 < sweep.size(); ++j)
        curves += format_double(rc) + "," + format_double(dc) + "," + format_double(sweep[j]) + "," +
                  format_double(est[j].mean) + "," + format_double(est[j].std_error) + "\n";
      const ExactGainLaw single(cell);
      const double ref = est.back().mean;
      summary += format_double(rc) + "," + format_double(dc) + "," + format_double(ref) + "," +
                 format_double(average_ber(single, dbm_to_watts(cfg.reference_power_dbm), cfg.noise_sigma,
                                           cfg.pam_order)) +
                 "," + format_double(ber_floor(single.outage(), cfg.pam_order)) + "," +
                 (ref <= cfg.target_ber ? "true" : "false") + "\n";
    }
  }
  emit(dir / "multicell_curves.csv", curves);
  emit(dir / "multicell_summary.csv", summary);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOS channel statistics for LiFi attocells with random device orientation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed (overrides [run] seed)");
  app.add_option("--workers", g.workers, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::optional<std::size_t> samples, ksd_n;
  std::optional<int> grid, order;
  std::optional<std::string> model, source, fit_path, powers, radii, spacings;
  std::optional<double> target;
  bool mismatch = false;

  auto* sample = app.add_subcommand("sample", "Monte Carlo gain samples and summary");
  sample->add_option("--samples", samples, "Number of draws");
  auto* exact = app.add_subcommand("exact", "Tabulated exact pdf and cdf of the gain");
  exact->add_option("--grid-size", grid, "Number of table nodes (>= 64)");
  auto* fit = app.add_subcommand("fit", "Moment-matching fit and its KSD against simulation");
  fit->add_option("--model", model, "MTL, MB, SMTG or SMB");
  fit->add_flag("--allow-mode-mismatch", mismatch, "Permit a family designed for the other activity");
  fit->add_option("--ksd-samples", ksd_n, "Monte Carlo draws for the KSD");
  auto* ber = app.add_subcommand("ber", "Average M-PAM error probability over a power sweep");
  ber->add_option("--source", source, "exact, montecarlo or fitted:<TAG>");
  ber->add_option("--fit", fit_path, "Fitted model JSON to use with a fitted source");
  ber->add_option("--power-dbm", powers, "Sweep as start:stop:step or a comma list");
  ber->add_option("--order", order, "PAM order M (2 is OOK)");
  ber->add_flag("--allow-mode-mismatch", mismatch, "Permit a family designed for the other activity");
  auto* multicell = app.add_subcommand("multicell", "Five-AP layout BER over a (R_c, D_c) grid");
  multicell->add_option("--cell-radii", radii, "R_c values");
  multicell->add_option("--spacings", spacings, "D_c values");
  multicell->add_option("--target", target, "Target error probability");
  multicell->add_option("--power-dbm", powers, "Sweep as start:stop:step or a comma list");
  auto* config = app.add_subcommand("config", "Print the canonical form of the configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    diagnostic("usage", e.what());
    return kUsage;
  }

  try {
    if (*sample) return cmd_sample(g, samples);
    if (*exact) return cmd_exact(g, grid);
    if (*fit) return cmd_fit(g, model, mismatch, ksd_n);
    if (*ber) return cmd_ber(g, source, fit_path, powers, order, mismatch);
    if (*multicell) return cmd_multicell(g, radii, spacings, target, powers);
    if (*config) {
      std::cout << canonical_config(load(g));
      return kOk;
    }
  } catch (const ConfigError& e) {
    diagnostic("config", e.what());
    return kUsage;
  } catch (const UsageError& e) {
    diagnostic("usage", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    diagnostic("usage", e.what());
    return kUsage;
  } catch (const FitError& e) {
    diagnostic("fit", e.what(), e.trace());
    return kNumerical;
  } catch (const QuadratureError& e) {
    diagnostic("numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    diagnostic("io", e.what());
    return kUsage;
  }
  return kUsage;
}
