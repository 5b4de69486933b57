#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lifi/channel.hpp"
#include "lifi/fitted_models.hpp"
#include "lifi/gain_law.hpp"
#include "lifi/performance.hpp"
#include "lifi/scenario.hpp"

namespace lifi {

inline constexpr int kFormatVersion = 1;

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario plus the per-command options of one run. Read from an INI file
/// with sections [ap], [ue], [cell], [mode] and [run]; angles in degrees,
/// powers in dBm.
struct RunConfig {
  Scenario scenario = Scenario::reference(MobilityMode::Stationary, 1.0, deg_to_rad(90.0));

  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int grid_size = 512;
  std::optional<ModelTag> model;
  bool allow_mode_mismatch = false;
  /// Size of the fresh Monte Carlo sample a fit is scored against.
  std::size_t ksd_samples = 1'000'000;

  std::vector<double> powers_dbm;
  double noise_sigma = 1e-8;
  int pam_order = 2;
  /// "exact", "fitted:<TAG>" or "montecarlo".
  std::string ber_source = "exact";

  std::vector<double> cell_radii{1.0};
  std::vector<double> spacings{1.0};
  double target_ber = 3.8e-3;
  double reference_power_dbm = 20.0;

  bool operator==(const RunConfig&) const = default;
};

/// Default power sweep: -20 dBm to 30 dBm in 2 dB steps.
std::vector<double> default_power_sweep();

/// Parses INI text. Unknown sections or keys, unparsable values and invalid
/// scenarios raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical INI text listing every field; parse_config inverts it exactly.
std::string canonical_config(const RunConfig& config);

/// "a:b:step" range or comma-separated list.
std::vector<double> parse_number_list(const std::string& text);

std::string samples_csv(const GainSampleSet& set);
std::string samples_summary_json(const GainSampleSet& set);
/// Header comment lines carry p0 and the quadrature tolerances.
std::string law_csv(const GainLaw& law, const std::string& scenario_digest, const QuadratureSpec& spec);
std::string fitted_model_json(const FittedModel& model, const std::string& scenario_digest,
                              std::optional<double> ksd = std::nullopt, std::size_t ksd_samples = 0,
                              std::uint64_t seed = 0);
FittedModel fitted_model_from_json(const std::string& text);
/// First line is a JSON header after "# ", then P_opt_dBm,ber[,std_error] rows.
std::string ber_curve_csv(const BerCurve& curve);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace lifi
