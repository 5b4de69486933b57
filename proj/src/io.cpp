#include "lifi/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "lifi/format.hpp"

namespace lifi {

namespace {

using nlohmann::json;
namespace pt = boost::property_tree;

std::string trim(const std::string& text) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = text.find_last_not_of(" \t\r\n");
  return text.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a finite number, got '" + raw + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError(key + ": expected a nonnegative integer, got '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
  return out;
}

// Shortest decimal degree value that converts back to exactly `rad`.
std::string degrees_text(double rad) {
  char buf[40];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, rad_to_deg(rad));
    if (deg_to_rad(std::strtod(buf, nullptr)) == rad) return format_double(std::strtod(buf, nullptr));
  }
  // No short form exists; try the neighbors of the nearest degree value.
  double deg = rad_to_deg(rad);
  for (int step = 0; step < 8; ++step) {
    for (double dir : {1.0, -1.0}) {
      double probe = deg;
      for (int k = 0; k < step; ++k) probe = std::nextafter(probe, dir * std::numeric_limits<double>::infinity());
      if (deg_to_rad(probe) == rad) return format_double(probe);
    }
  }
  return format_double(deg);
}

json support_json(const ModelSupport& s) { return {{"lo", s.lo}, {"hi", s.hi}}; }

json params_json(const ModelParams& params) {
  struct Visitor {
    json operator()(const MtlParams& p) const { return {{"nu", p.nu}, {"mu", p.mu}, {"b", p.b}}; }
    json operator()(const MbParams& p) const { return {{"nu", p.nu}, {"alpha", p.alpha}, {"beta", p.beta}}; }
    json operator()(const SmtgParams& p) const {
      json out = json::array();
      for (const auto& c : p.components) out.push_back({{"nu", c.nu}, {"mu", c.mu}, {"sigma", c.sigma}});
      return out;
    }
    json operator()(const SmbParams& p) const {
      json out = json::array();
      for (const auto& c : p.components) out.push_back((*this)(c));
      return out;
    }
  };
  return std::visit(Visitor{}, params);
}

ModelParams params_from_json(ModelTag tag, const json& j) {
  auto mb = [](const json& c) { return MbParams{c.at("nu"), c.at("alpha"), c.at("beta")}; };
  switch (tag) {
    case ModelTag::MTL: return MtlParams{j.at("nu"), j.at("mu"), j.at("b")};
    case ModelTag::MB: return mb(j);
    case ModelTag::SMTG: {
      SmtgParams p;
      if (j.size() != 3) throw ConfigError("SMTG needs three components");
      for (std::size_t k = 0; k < 3; ++k) p.components[k] = {j[k].at("nu"), j[k].at("mu"), j[k].at("sigma")};
      return p;
    }
    case ModelTag::SMB: {
      SmbParams p;
      if (j.size() != 3) throw ConfigError("SMB needs three components");
      for (std::size_t k = 0; k < 3; ++k) p.components[k] = mb(j[k]);
      return p;
    }
  }
  throw ConfigError("unknown model tag");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::vector<double> default_power_sweep() {
  std::vector<double> out;
  for (int k = 0; k <= 25; ++k) out.push_back(-20.0 + 2.0 * k);
  return out;
}

std::vector<double> parse_number_list(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) return {};
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(parse_double("range", item));
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0])
      throw ConfigError("range '" + raw + "' must be start:stop:step with step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    if (count > 100000) throw ConfigError("range '" + raw + "' has too many points");
    std::vector<double> out;
    for (long k = 0; k <= count; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    return out;
  }
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_double("list", item));
  return out;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  // Activity first: it selects the defaults the other keys override.
  MobilityMode mode = MobilityMode::Stationary;
  if (const auto v = tree.get_optional<std::string>("mode.activity")) {
    try {
      mode = mobility_mode_from_string(trim(*v));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("mode.activity: ") + e.what());
    }
  }
  RunConfig cfg;
  cfg.scenario = Scenario::reference(mode, 1.0, deg_to_rad(90.0));
  cfg.powers_dbm = default_power_sweep();
  Scenario& s = cfg.scenario;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto number = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = parse_double(k, v); };
  };
  auto degrees = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = deg_to_rad(parse_double(k, v)); };
  };
  std::map<std::string, std::map<std::string, Setter>> keys;
  keys["ap"] = {{"height", number(s.ap.height)},
                {"semi_angle_deg", degrees(s.ap.semi_angle)},
                {"conversion", number(s.ap.conversion)}};
  keys["ue"] = {{"height", number(s.ue.height)},
                {"responsivity", number(s.ue.responsivity)},
                {"area", number(s.ue.area)},
                {"refractive_index", number(s.ue.refractive_index)},
                {"fov_deg", degrees(s.ue.fov)}};
  bool outer_given = false;
  keys["cell"] = {{"radius", number(s.cell.attocell_radius)},
                  {"outer_radius", [&](const std::string& k, const std::string& v) {
                     s.cell.outer_radius = parse_double(k, v);
                     outer_given = true;
                   }}};
  keys["mode"] = {{"activity", [](const std::string&, const std::string&) {}},
                  {"elevation_mean_deg", degrees(s.orientation.mean)},
                  {"elevation_std_deg", degrees(s.orientation.stddev)}};
  keys["run"] = {
      {"samples", [&](const std::string& k, const std::string& v) { cfg.samples = parse_unsigned(k, v); }},
      {"seed", [&](const std::string& k, const std::string& v) { cfg.seed = parse_unsigned(k, v); }},
      {"grid_size",
       [&](const std::string& k, const std::string& v) {
         const auto n = parse_unsigned(k, v);
         if (n < 64 || n > 1'000'000) throw ConfigError(k + ": must lie in [64, 1000000]");
         cfg.grid_size = static_cast<int>(n);
       }},
      {"model",
       [&](const std::string& k, const std::string& v) {
         try {
           cfg.model = model_tag_from_string(trim(v));
         } catch (const DomainError& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"allow_mode_mismatch",
       [&](const std::string& k, const std::string& v) { cfg.allow_mode_mismatch = parse_bool(k, v); }},
      {"ksd_samples", [&](const std::string& k, const std::string& v) { cfg.ksd_samples = parse_unsigned(k, v); }},
      {"power_dbm", [&](const std::string&, const std::string& v) { cfg.powers_dbm = parse_number_list(v); }},
      {"noise_sigma", number(cfg.noise_sigma)},
      {"pam_order",
       [&](const std::string& k, const std::string& v) {
         const auto n = parse_unsigned(k, v);
         if (n < 2 || n > 1024) throw ConfigError(k + ": must lie in [2, 1024]");
         cfg.pam_order = static_cast<int>(n);
       }},
      {"source", [&](const std::string&, const std::string& v) { cfg.ber_source = trim(v); }},
      {"cell_radii", [&](const std::string&, const std::string& v) { cfg.cell_radii = parse_number_list(v); }},
      {"spacings", [&](const std::string&, const std::string& v) { cfg.spacings = parse_number_list(v); }},
      {"target_ber", number(cfg.target_ber)},
      {"reference_power_dbm", number(cfg.reference_power_dbm)},
  };

  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) throw ConfigError("key '" + section + "' lies outside any section");
    const auto known = keys.find(section);
    if (known == keys.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      const auto setter = known->second.find(key);
      if (setter == known->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      setter->second(section + "." + key, value.data());
    }
  }
  if (!outer_given) s.cell.outer_radius = s.cell.attocell_radius;

  try {
    validate(s);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  if (cfg.samples == 0) throw ConfigError("run.samples must be positive");
  if (cfg.ksd_samples == 0) throw ConfigError("run.ksd_samples must be positive");
  if (!(cfg.noise_sigma > 0)) throw ConfigError("run.noise_sigma must be positive");
  if (!(cfg.target_ber > 0 && cfg.target_ber < 1)) throw ConfigError("run.target_ber must lie in (0, 1)");
  const std::string& src = cfg.ber_source;
  if (src != "exact" && src != "montecarlo") {
    if (src.rfind("fitted:", 0) != 0) throw ConfigError("run.source must be exact, montecarlo or fitted:<TAG>");
    try {
      model_tag_from_string(src.substr(7));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("run.source: ") + e.what());
    }
  }
  for (double r : cfg.cell_radii)
    if (!(r > 0)) throw ConfigError("run.cell_radii must be positive");
  for (double d : cfg.spacings)
    if (!(d > 0)) throw ConfigError("run.spacings must be positive");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string canonical_config(const RunConfig& cfg) {
  const Scenario& s = cfg.scenario;
  std::ostringstream os;
  auto put = [&os](const char* key, const std::string& v) { os << key << " = " << v << '\n'; };
  auto num = [&](const char* key, double v) { put(key, format_double(v)); };
  auto deg = [&](const char* key, double v) { put(key, degrees_text(v)); };
  os << "[ap]\n";
  num("height", s.ap.height);
  deg("semi_angle_deg", s.ap.semi_angle);
  num("conversion", s.ap.conversion);
  os << "\n[ue]\n";
  num("height", s.ue.height);
  num("responsivity", s.ue.responsivity);
  num("area", s.ue.area);
  num("refractive_index", s.ue.refractive_index);
  deg("fov_deg", s.ue.fov);
  os << "\n[cell]\n";
  num("radius", s.cell.attocell_radius);
  num("outer_radius", s.cell.outer_radius);
  os << "\n[mode]\n";
  put("activity", to_string(s.mode));
  deg("elevation_mean_deg", s.orientation.mean);
  deg("elevation_std_deg", s.orientation.stddev);
  os << "\n[run]\n";
  put("samples", std::to_string(cfg.samples));
  put("seed", std::to_string(cfg.seed));
  put("grid_size", std::to_string(cfg.grid_size));
  if (cfg.model) put("model", to_string(*cfg.model));
  put("allow_mode_mismatch", cfg.allow_mode_mismatch ? "true" : "false");
  put("ksd_samples", std::to_string(cfg.ksd_samples));
  put("power_dbm", join(cfg.powers_dbm));
  num("noise_sigma", cfg.noise_sigma);
  put("pam_order", std::to_string(cfg.pam_order));
  put("source", cfg.ber_source);
  put("cell_radii", join(cfg.cell_radii));
  put("spacings", join(cfg.spacings));
  num("target_ber", cfg.target_ber);
  num("reference_power_dbm", cfg.reference_power_dbm);
  return os.str();
}

std::string samples_csv(const GainSampleSet& set) {
  std::string out = "# format_version=" + std::to_string(kFormatVersion) + " scenario=" + set.scenario_digest +
                    " seed=" + std::to_string(set.seed) + "\ngain\n";
  out.reserve(out.size() + set.gains.size() * 24);
  for (double g : set.gains) {
    out += format_double(g);
    out += '\n';
  }
  return out;
}

std::string samples_summary_json(const GainSampleSet& set) {
  long double sum = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double g : set.gains) {
    sum += g;
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  const double n = static_cast<double>(set.gains.size());
  json j{{"format_version", kFormatVersion},
         {"scenario_digest", set.scenario_digest},
         {"seed", set.seed},
         {"n", set.n_total},
         {"n_outage", set.n_outage},
         {"outage_frequency", set.outage_frequency()},
         {"mean", set.gains.empty() ? 0.0 : static_cast<double>(sum / n)},
         {"min", set.gains.empty() ? 0.0 : lo},
         {"max", set.gains.empty() ? 0.0 : hi}};
  return dump(j);
}

std::string law_csv(const GainLaw& law, const std::string& digest, const QuadratureSpec& spec) {
  std::string out = "# format_version=" + std::to_string(kFormatVersion) + " scenario=" + digest +
                    " source=" + law.label() + "\n# p0=" + format_double(law.outage_mass()) +
                    " rel_tol=" + format_double(spec.rel_tol) + " abs_tol=" + format_double(spec.abs_tol) +
                    "\nh,pdf,cdf\n";
  const auto& h = law.nodes();
  for (std::size_t i = 0; i < h.size(); ++i)
    out += format_double(h[i]) + "," + format_double(law.pdf_values()[i]) + "," + format_double(law.cdf_values()[i]) +
           "\n";
  return out;
}

std::string fitted_model_json(const FittedModel& model, const std::string& digest, std::optional<double> ksd,
                              std::size_t ksd_samples, std::uint64_t seed) {
  json j{{"format_version", kFormatVersion},
         {"scenario_digest", digest},
         {"tag", to_string(model.tag())},
         {"params", params_json(model.params)},
         {"p0", model.p0},
         {"support", support_json(model.support)},
         {"residual", model.residual},
         {"converged", model.converged},
         {"matched_moments", model.matched_moments},
         {"start_residuals", model.start_residuals}};
  if (ksd) {
    j["ksd"] = *ksd;
    j["ksd_samples"] = ksd_samples;
    j["seed"] = seed;
  }
  return dump(j);
}

FittedModel fitted_model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    FittedModel m;
    const ModelTag tag = model_tag_from_string(j.at("tag").get<std::string>());
    m.params = params_from_json(tag, j.at("params"));
    m.p0 = j.at("p0");
    m.support = {j.at("support").at("lo"), j.at("support").at("hi")};
    m.residual = j.value("residual", 0.0);
    m.converged = j.value("converged", true);
    m.matched_moments = j.value("matched_moments", std::vector<double>{});
    m.start_residuals = j.value("start_residuals", std::vector<double>{});
    if (!(m.p0 >= 0 && m.p0 < 1) || !(m.support.hi > m.support.lo && m.support.lo >= 0))
      throw ConfigError("fitted model has an invalid outage mass or support");
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fitted model JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("fitted model JSON: ") + e.what());
  }
}

std::string ber_curve_csv(const BerCurve& curve) {
  const bool mc = curve.source == "montecarlo";
  json header{{"format_version", kFormatVersion}, {"M", curve.order},
              {"sigma", curve.noise_sigma},       {"scenario_digest", curve.scenario_digest},
              {"source", curve.source},           {"ber_floor", curve.floor}};
  std::string out = "# " + header.dump() + "\nP_opt_dBm,ber" + (mc ? ",std_error" : "") + "\n";
  for (const auto& p : curve.points) {
    out += format_double(p.p_opt_dbm) + "," + format_double(p.ber);
    if (mc) out += "," + format_double(p.std_error);
    out += "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lifi
