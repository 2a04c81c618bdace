#include "qmqfc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

namespace pt = boost::property_tree;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string key_name(const std::string& section, const std::string& key) {
  return section + "." + key;
}

double parse_number(const std::string& where, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, text));
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& where, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", where, text));
  }
  return v;
}

bool parse_bool(const std::string& where, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where, text));
}

std::vector<std::string_view> split_list(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    const auto item = trim(text.substr(start, pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_list(const std::string& where, std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text, ',')) out.push_back(parse_number(where, item));
  return out;
}

FilterChain parse_filters(const std::string& where, std::string_view text) {
  FilterChain chain;
  for (auto item : split_list(text, ',')) {
    const auto parts = split_list(item, ':');
    if (parts.size() != 3) {
      throw ConfigError(fmt::format("{}: filter '{}' must be name:dB:transmission", where, item));
    }
    chain.elements.push_back({std::string(parts[0]), parse_number(where, parts[1]),
                              parse_number(where, parts[2])});
  }
  return chain;
}

std::string fmt_exact(double v) { return fmt::format("{:.17g}", v); }

std::string fmt_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt_exact(values[i]);
  }
  return out;
}

void require_non_negative(const std::string& where, const std::vector<double>& values) {
  for (double v : values) {
    if (v < 0.0) throw ConfigError(fmt::format("{}: negative entry {}", where, v));
  }
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"constants", {"boltzmann_k", "rb87_mass", "speed_of_light", "fiber_group_velocity"}},
      {"experiment",
       {"preset", "p", "write_power", "kappa", "eta_cw", "eta_r", "eta_ret_intrinsic", "xi_g",
        "solid_angle_w", "solid_angle_r", "p_noise_w", "p_noise_r"}},
      {"dephasing",
       {"atomic_mass", "temperature", "tau", "delta_k", "angle_deg", "lambda_write_pulse",
        "lambda_write_photon"}},
      {"device",
       {"eta_n", "length", "eta_int_max", "eta_coupling", "filters", "eta_surfaces", "eta_fiber",
        "noise_coeff", "dark_rate", "detector_eff", "gate"}},
      {"simulation",
       {"storage_time", "trials", "seed", "converted", "pump_power", "write_collection",
        "statistics"}},
      {"sweep",
       {"pump_powers", "include_optimum", "mu_in", "mu_values", "snr_pump_power", "write_powers",
        "storage_times", "table1_mode"}},
      {"link", {"atten_telecom", "atten_near", "eta_dev", "eta_devs", "storage_times"}},
  };
  return keys;
}

using Section = std::map<std::string, std::string>;

// Section name -> key -> raw value, after schema checks.
std::map<std::string, Section> read_sections(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  std::map<std::string, Section> out;
  for (const auto& [section, child] : tree) {
    const auto known = schema().find(section);
    if (child.empty() && !child.data().empty()) {
      throw ConfigError(fmt::format("key '{}' outside any section", section));
    }
    if (known == schema().end()) {
      throw ConfigError(fmt::format("unknown config section [{}]", section));
    }
    for (const auto& [key, value] : child) {
      if (!known->second.contains(key)) {
        throw ConfigError(fmt::format("unknown config key '{}'", key_name(section, key)));
      }
      out[section][key] = value.data();
    }
  }
  return out;
}

class SectionReader {
 public:
  SectionReader(const std::map<std::string, Section>& all, std::string name)
      : name_(std::move(name)) {
    if (const auto it = all.find(name_); it != all.end()) values_ = it->second;
  }

  bool has(const std::string& key) const { return values_.contains(key); }
  std::string where(const std::string& key) const { return key_name(name_, key); }
  const std::string& raw(const std::string& key) const { return values_.at(key); }

  void number(const std::string& key, double& target) const {
    if (has(key)) target = parse_number(where(key), raw(key));
  }
  void list(const std::string& key, std::vector<double>& target) const {
    if (has(key)) target = parse_list(where(key), raw(key));
  }
  void boolean(const std::string& key, bool& target) const {
    if (has(key)) target = parse_bool(where(key), raw(key));
  }
  void integer(const std::string& key, std::uint64_t& target) const {
    if (has(key)) target = parse_unsigned(where(key), raw(key));
  }

 private:
  std::string name_;
  Section values_;
};

template <class Fn>
void as_config_error(Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

PhysicalConstants read_constants(const SectionReader& s) {
  const PhysicalConstants d;
  double k = d.boltzmann_k(), m = d.rb87_mass(), c = d.speed_of_light(),
         v = d.fiber_group_velocity();
  s.number("boltzmann_k", k);
  s.number("rb87_mass", m);
  s.number("speed_of_light", c);
  s.number("fiber_group_velocity", v);
  PhysicalConstants out;
  as_config_error([&] { out = PhysicalConstants(k, m, c, v); });
  return out;
}

void read_experiment(const SectionReader& s, RunConfig& cfg) {
  if (s.has("preset")) {
    const auto preset = std::string(trim(s.raw("preset")));
    if (preset == "paper") {
      cfg.experiment = default_paper_params();
    } else if (preset == "storage_decay") {
      cfg.experiment = storage_decay_params();
    } else {
      throw ConfigError(fmt::format("{}: unknown preset '{}' (paper, storage_decay)",
                                    s.where("preset"), preset));
    }
  }
  s.number("kappa", cfg.power_map.kappa);
  if (!(cfg.power_map.kappa > 0.0)) throw ConfigError("experiment.kappa must be positive");
  if (s.has("p") && s.has("write_power")) {
    throw ConfigError("experiment.p and experiment.write_power are mutually exclusive");
  }
  auto& e = cfg.experiment;
  s.number("p", e.p);
  if (s.has("write_power")) {
    double pw = 0.0;
    s.number("write_power", pw);
    as_config_error([&] { e.p = cfg.power_map.pair_probability(pw); });
  }
  s.number("eta_cw", e.eta_cw);
  s.number("eta_r", e.eta_r);
  s.number("eta_ret_intrinsic", e.eta_ret_intrinsic);
  s.number("xi_g", e.xi_g);
  s.number("solid_angle_w", e.solid_angle_w);
  s.number("solid_angle_r", e.solid_angle_r);
  s.number("p_noise_w", e.p_noise_w);
  s.number("p_noise_r", e.p_noise_r);
  const auto report = validate(e);
  if (!report.empty()) throw ConfigError("[experiment] " + to_string(report));
}

void read_dephasing(const SectionReader& s, RunConfig& cfg) {
  const bool any = s.has("atomic_mass") || s.has("temperature") || s.has("tau") ||
                   s.has("delta_k") || s.has("angle_deg") || s.has("lambda_write_pulse") ||
                   s.has("lambda_write_photon");
  if (!any) {
    as_config_error([&] {
      cfg.dephasing = DephasingModel::from_coherence_time(
          cfg.constants.rb87_mass(), default_dephasing().tau(), default_dephasing().delta_k(),
          cfg.constants);
    });
    return;
  }
  if (s.has("temperature") && s.has("tau")) {
    throw ConfigError("dephasing.temperature and dephasing.tau are mutually exclusive");
  }
  const bool geometry =
      s.has("angle_deg") || s.has("lambda_write_pulse") || s.has("lambda_write_photon");
  if (geometry && s.has("delta_k")) {
    throw ConfigError("dephasing.delta_k conflicts with the angle/wavelength keys");
  }
  double mass = cfg.constants.rb87_mass();
  s.number("atomic_mass", mass);
  double delta_k = default_dephasing().delta_k();
  if (geometry) {
    double angle_deg = 3.0, l_pulse = 780e-9, l_photon = 780e-9;
    s.number("angle_deg", angle_deg);
    s.number("lambda_write_pulse", l_pulse);
    s.number("lambda_write_photon", l_photon);
    as_config_error([&] {
      delta_k = delta_k_from_geometry(l_pulse, l_photon, angle_deg * std::numbers::pi / 180.0);
    });
  }
  s.number("delta_k", delta_k);
  as_config_error([&] {
    if (s.has("temperature")) {
      double temperature = 0.0;
      s.number("temperature", temperature);
      cfg.dephasing = DephasingModel::from_temperature(mass, temperature, delta_k, cfg.constants);
    } else {
      double tau = default_dephasing().tau();
      s.number("tau", tau);
      cfg.dephasing = DephasingModel::from_coherence_time(mass, tau, delta_k, cfg.constants);
    }
  });
}

void read_device(const SectionReader& s, RunConfig& cfg) {
  auto& d = cfg.device;
  s.number("eta_n", d.eta_n);
  s.number("length", d.length);
  s.number("eta_int_max", d.eta_int_max);
  s.number("eta_coupling", d.eta_coupling);
  if (s.has("filters")) d.filters = parse_filters(s.where("filters"), s.raw("filters"));
  s.number("eta_surfaces", d.eta_surfaces);
  s.number("eta_fiber", d.eta_fiber);
  s.number("noise_coeff", d.noise_coeff);
  s.number("dark_rate", d.dark_rate);
  s.number("detector_eff", d.detector_eff);
  s.number("gate", d.gate);
  as_config_error([&] { require_valid(d); });
}

void read_simulation(const SectionReader& s, RunConfig& cfg) {
  auto& sim = cfg.simulation;
  s.number("storage_time", sim.storage_time);
  s.integer("trials", sim.trials);
  s.integer("seed", sim.seed);
  s.boolean("converted", sim.converted);
  s.number("pump_power", sim.pump_power);
  s.number("write_collection", sim.write_collection);
  if (s.has("statistics")) {
    try {
      sim.statistics = parse_pair_statistics(std::string(trim(s.raw("statistics"))));
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("{}: {}", s.where("statistics"), e.what()));
    }
  }
  if (sim.storage_time < 0.0) throw ConfigError("simulation.storage_time must be >= 0");
  if (sim.trials == 0) throw ConfigError("simulation.trials must be positive");
  if (sim.pump_power < 0.0) throw ConfigError("simulation.pump_power must be >= 0");
  if (!(sim.write_collection >= 0.0 && sim.write_collection <= 1.0)) {
    throw ConfigError("simulation.write_collection must lie in [0, 1]");
  }
}

void read_sweep(const SectionReader& s, RunConfig& cfg) {
  auto& sw = cfg.sweep;
  s.list("pump_powers", sw.pump_powers);
  s.boolean("include_optimum", sw.include_optimum);
  s.number("mu_in", sw.mu_in);
  s.list("mu_values", sw.mu_values);
  s.number("snr_pump_power", sw.snr_pump_power);
  s.list("write_powers", sw.write_powers);
  s.list("storage_times", sw.storage_times);
  if (s.has("table1_mode")) sw.table1_mode = std::string(trim(s.raw("table1_mode")));
  require_non_negative("sweep.pump_powers", sw.pump_powers);
  require_non_negative("sweep.mu_values", sw.mu_values);
  require_non_negative("sweep.write_powers", sw.write_powers);
  require_non_negative("sweep.storage_times", sw.storage_times);
  if (sw.mu_in < 0.0) throw ConfigError("sweep.mu_in must be >= 0");
  if (sw.snr_pump_power < 0.0) throw ConfigError("sweep.snr_pump_power must be >= 0");
  if (sw.table1_mode != "published" && sw.table1_mode != "simulated") {
    throw ConfigError("sweep.table1_mode must be 'published' or 'simulated'");
  }
}

void read_link(const SectionReader& s, RunConfig& cfg) {
  auto& l = cfg.link;
  s.number("atten_telecom", l.atten_telecom);
  s.number("atten_near", l.atten_near);
  s.number("eta_dev", l.eta_dev);
  s.list("eta_devs", l.eta_devs);
  s.list("storage_times", l.storage_times);
  if (!(l.atten_telecom > 0.0) || !(l.atten_near > 0.0)) {
    throw ConfigError("link attenuations must be positive");
  }
  const auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(l.eta_dev) || !std::all_of(l.eta_devs.begin(), l.eta_devs.end(), in_unit)) {
    throw ConfigError("link device efficiencies must lie in (0, 1]");
  }
  require_non_negative("link.storage_times", l.storage_times);
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.sweep.pump_powers = linspace(0.0, 0.9, 19);
  cfg.sweep.pump_powers.push_back(0.287);
  std::sort(cfg.sweep.pump_powers.begin(), cfg.sweep.pump_powers.end());
  cfg.sweep.mu_values = {0.02, 0.05, 0.1, 0.16, 0.2, 0.3, 0.5, 0.7, 1.0};
  cfg.sweep.write_powers = {0.1e-3, 0.17e-3, 0.3e-3, 0.5e-3, 0.65e-3, 1.0e-3,
                            1.5e-3, 2.39e-3, 3.0e-3, 4.0e-3};
  cfg.sweep.storage_times = linspace(0.0, 60e-6, 16);
  cfg.link.eta_devs = {0.05, 0.10, 0.20, 0.30, 0.50, 1.0};
  cfg.link.storage_times = {10e-6, 20e-6, 40e-6, 60e-6, 100e-6};
  return cfg;
}

RunConfig parse_config(std::string_view text) {
  const auto sections = read_sections(text);
  RunConfig cfg = default_run_config();
  cfg.constants = read_constants(SectionReader(sections, "constants"));
  read_experiment(SectionReader(sections, "experiment"), cfg);
  read_dephasing(SectionReader(sections, "dephasing"), cfg);
  read_device(SectionReader(sections, "device"), cfg);
  read_simulation(SectionReader(sections, "simulation"), cfg);
  read_sweep(SectionReader(sections, "sweep"), cfg);
  read_link(SectionReader(sections, "link"), cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  const auto line = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "[constants]\n";
  line("boltzmann_k", fmt_exact(c.constants.boltzmann_k()));
  line("rb87_mass", fmt_exact(c.constants.rb87_mass()));
  line("speed_of_light", fmt_exact(c.constants.speed_of_light()));
  line("fiber_group_velocity", fmt_exact(c.constants.fiber_group_velocity()));

  const auto& e = c.experiment;
  out += "\n[experiment]\n";
  line("kappa", fmt_exact(c.power_map.kappa));
  line("p", fmt_exact(e.p));
  line("eta_cw", fmt_exact(e.eta_cw));
  line("eta_r", fmt_exact(e.eta_r));
  line("eta_ret_intrinsic", fmt_exact(e.eta_ret_intrinsic));
  line("xi_g", fmt_exact(e.xi_g));
  line("solid_angle_w", fmt_exact(e.solid_angle_w));
  line("solid_angle_r", fmt_exact(e.solid_angle_r));
  line("p_noise_w", fmt_exact(e.p_noise_w));
  line("p_noise_r", fmt_exact(e.p_noise_r));

  out += "\n[dephasing]\n";
  line("atomic_mass", fmt_exact(c.dephasing.atomic_mass()));
  line("temperature", fmt_exact(c.dephasing.temperature()));
  line("delta_k", fmt_exact(c.dephasing.delta_k()));

  const auto& d = c.device;
  out += "\n[device]\n";
  line("eta_n", fmt_exact(d.eta_n));
  line("length", fmt_exact(d.length));
  line("eta_int_max", fmt_exact(d.eta_int_max));
  line("eta_coupling", fmt_exact(d.eta_coupling));
  std::string filters;
  for (std::size_t i = 0; i < d.filters.elements.size(); ++i) {
    const auto& f = d.filters.elements[i];
    if (i > 0) filters += ", ";
    filters += fmt::format("{}:{}:{}", f.name, fmt_exact(f.extinction_db), fmt_exact(f.transmission));
  }
  line("filters", filters);
  line("eta_surfaces", fmt_exact(d.eta_surfaces));
  line("eta_fiber", fmt_exact(d.eta_fiber));
  line("noise_coeff", fmt_exact(d.noise_coeff));
  line("dark_rate", fmt_exact(d.dark_rate));
  line("detector_eff", fmt_exact(d.detector_eff));
  line("gate", fmt_exact(d.gate));

  const auto& s = c.simulation;
  out += "\n[simulation]\n";
  line("storage_time", fmt_exact(s.storage_time));
  line("trials", std::to_string(s.trials));
  line("seed", std::to_string(s.seed));
  line("converted", s.converted ? "true" : "false");
  line("pump_power", fmt_exact(s.pump_power));
  line("write_collection", fmt_exact(s.write_collection));
  line("statistics", to_string(s.statistics));

  const auto& w = c.sweep;
  out += "\n[sweep]\n";
  line("pump_powers", fmt_list(w.pump_powers));
  line("include_optimum", w.include_optimum ? "true" : "false");
  line("mu_in", fmt_exact(w.mu_in));
  line("mu_values", fmt_list(w.mu_values));
  line("snr_pump_power", fmt_exact(w.snr_pump_power));
  line("write_powers", fmt_list(w.write_powers));
  line("storage_times", fmt_list(w.storage_times));
  line("table1_mode", w.table1_mode);

  const auto& l = c.link;
  out += "\n[link]\n";
  line("atten_telecom", fmt_exact(l.atten_telecom));
  line("atten_near", fmt_exact(l.atten_near));
  line("eta_dev", fmt_exact(l.eta_dev));
  line("eta_devs", fmt_list(l.eta_devs));
  line("storage_times", fmt_list(l.storage_times));
  return out;
}

SimulationConfig make_simulation_config(const RunConfig& config, unsigned workers) {
  SimulationConfig sim;
  sim.params = config.experiment;
  sim.device = config.device;
  sim.deph = config.dephasing;
  sim.storage_time = config.simulation.storage_time;
  sim.n_trials = config.simulation.trials;
  sim.seed = config.simulation.seed;
  sim.converted = config.simulation.converted;
  sim.pump_power = config.simulation.pump_power;
  sim.write_collection = config.simulation.write_collection;
  sim.statistics = config.simulation.statistics;
  sim.workers = std::max(1u, workers);
  return sim;
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> out;
  for (const auto& [section, keys] : schema()) {
    for (const auto& k : keys) out.push_back(key_name(section, k));
  }
  return out;
}

}  // namespace qmqfc
