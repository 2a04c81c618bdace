#include "qmqfc/repro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qmqfc/errors.hpp"
#include "qmqfc/event_sim.hpp"
#include "qmqfc/fit.hpp"
#include "qmqfc/reference.hpp"
#include "qmqfc/rng.hpp"
#include "qmqfc/stats.hpp"

namespace qmqfc::repro {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::uint64_t kSnrTag = 0x736E72;          // "snr"
constexpr std::uint64_t kCorrelationTag = 0x636F7272;  // "corr"
constexpr std::uint64_t kDecayTag = 0x6465636179;      // "decay"
constexpr std::uint64_t kTable1Tag = 0x74626C31;       // "tbl1"

ExperimentParams with_write_power(const RunConfig& config, double write_power) {
  ExperimentParams params = config.experiment;
  params.p = config.power_map.pair_probability(write_power);
  return params;
}

SimulationConfig point_simulation(const RunConfig& config, unsigned workers, std::uint64_t index,
                                  std::uint64_t tag) {
  SimulationConfig sim = make_simulation_config(config, workers);
  sim.seed = derive_seed(config.simulation.seed, index, tag);
  return sim;
}

CorrelationEstimate g2_or_nan(const TrialCounts& counts) {
  try {
    return g2_cross(counts);
  } catch (const UndefinedEstimate&) {
    CorrelationEstimate e;
    e.value = kNaN;
    e.sigma = kNaN;
    return e;
  }
}

// Noise-free model detection probabilities with the simulator's write-arm
// efficiency, then independent noise clicks OR-ed in.
DetectionProbabilities noisy_model(double t, const SimulationConfig& sim) {
  const auto probs = trial_probabilities(sim);
  ExperimentParams e = sim.params;
  e.eta_cw = probs.write_efficiency;
  const auto d = detection_probabilities(t, e, sim.deph);
  return add_independent_noise(d, probs.write_noise, probs.read_noise);
}

std::string fit_rows(const std::string& observable, const std::optional<FitResult>& maybe,
                     const std::string& note) {
  if (!maybe) {
    std::string clean = note;
    std::replace(clean.begin(), clean.end(), ',', ';');
    return fmt::format("{},not fitted: {},,\n", observable, clean);
  }
  const auto& fit = *maybe;
  std::string out;
  for (const auto& p : fit.parameters) {
    out += fmt::format("{},{},{},{}\n", observable, p.name, format_number(p.value),
                       format_number(p.sigma));
  }
  out += fmt::format("{},chi2,{},\n", observable, format_number(fit.chi2));
  out += fmt::format("{},dof,{},\n", observable, fit.dof);
  out += fmt::format("{},converged,{},\n", observable, fit.converged ? 1 : 0);
  return out;
}

std::vector<DataPoint> usable(std::vector<DataPoint> points) {
  std::erase_if(points, [](const DataPoint& p) {
    return !std::isfinite(p.y) || !std::isfinite(p.sigma) || !(p.sigma > 0.0);
  });
  return points;
}

}  // namespace

std::string hash_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
  return CounterStream(seed, index, tag)();
}

std::vector<double> pump_grid(const RunConfig& config) {
  std::vector<double> grid = config.sweep.pump_powers;
  if (config.sweep.include_optimum) grid.push_back(optimal_pump_power(config.device));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CsvTable qfc_curve(const RunConfig& config) {
  CsvTable table({"P_pump (W)", "eta_int", "eta_dev", "p_N (per gate)", "SNR"});
  const auto& dev = config.device;
  for (double p : pump_grid(config)) {
    table.add_numbers({p, eta_internal(p, dev), eta_device(p, dev),
                       noise_probability(p, dev).value, snr(config.sweep.mu_in, p, dev)});
  }
  return table;
}

SnrCurve snr_curve(const RunConfig& config, unsigned workers) {
  SnrCurve out{CsvTable({"mu_in (photons/pulse)", "SNR_model", "SNR_simulated",
                         "SNR_simulated_sigma", "eta_h_max_model"}),
               {}};
  const double pump = config.sweep.snr_pump_power;
  std::vector<DataPoint> points;
  std::uint64_t index = 0;
  for (double mu : config.sweep.mu_values) {
    ConversionRun run;
    run.device = config.device;
    run.pump_power = pump;
    run.mu_in = mu;
    run.n_trials = config.simulation.trials;
    run.workers = workers;
    run.seed = derive_seed(config.simulation.seed, index++, kSnrTag);
    const auto signal = simulate_conversion(run);
    run.mu_in = 0.0;
    run.seed = derive_seed(config.simulation.seed, index++, kSnrTag);
    const auto blocked = simulate_conversion(run);
    double value = kNaN;
    double sigma = kNaN;
    if (blocked.clicks > 0) {
      const auto est =
          snr_from_counts(signal.clicks, signal.n_trials, blocked.clicks, blocked.n_trials);
      value = est.value;
      sigma = est.sigma;
    }
    const double model = snr(mu, pump, config.device);
    out.table.add_numbers({mu, model, value, sigma, max_heralding_efficiency(model).value});
    points.push_back({mu, value, sigma});
  }
  const auto fit_points = usable(points);
  if (fit_points.size() < 2) {
    throw NumericalError("snr-curve: fewer than two simulated SNR points with noise counts");
  }
  out.slope_fit = fit_linear_origin(fit_points);
  return out;
}

CsvTable correlations(const RunConfig& config, unsigned workers) {
  CsvTable table({"P_W (W)", "p", "g2_wr_model", "SNR", "g2_cwr_composed", "g2_cwr_simulated",
                  "g2_cwr_simulated_sigma", "eta_h_max", "V_max"});
  std::uint64_t index = 0;
  for (double pw : config.sweep.write_powers) {
    if (!(pw > 0.0)) throw ConfigError("correlations: write powers must be positive");
    SimulationConfig sim = point_simulation(config, workers, index++, kCorrelationTag);
    sim.params = with_write_power(config, pw);
    require_valid(sim);
    const auto probs = trial_probabilities(sim);
    const double t = config.simulation.storage_time;
    const double g2_wr = g2_cross_closed(t, sim.params, sim.deph);
    const double signal = sim.params.p * probs.write_efficiency;
    const double snr_value = probs.write_noise > 0.0
                                 ? signal / probs.write_noise
                                 : std::numeric_limits<double>::infinity();
    const double composed = snr_value > 0.0 ? compose_g2_with_noise(g2_wr, snr_value) : 1.0;
    const auto simulated = g2_or_nan(simulate(sim));
    table.add_numbers({pw, sim.params.p, g2_wr, snr_value, composed, simulated.value,
                       simulated.sigma, max_heralding_efficiency(snr_value).value,
                       max_visibility(composed).value});
  }
  return table;
}

StorageDecay storage_decay(const RunConfig& config, unsigned workers) {
  StorageDecay out{CsvTable({"t (s)", "eta_ret_model", "g2_model", "g2_model_noise",
                             "eta_ret_simulated", "eta_ret_simulated_sigma", "g2_simulated",
                             "g2_simulated_sigma"}),
                   {}, {}, {}, {}, 0.0};
  std::vector<DataPoint> eta_points;
  std::vector<DataPoint> g2_points;
  std::uint64_t index = 0;
  for (double t : config.sweep.storage_times) {
    SimulationConfig sim = point_simulation(config, workers, index++, kDecayTag);
    sim.storage_time = t;
    const double eta_model = retrieval_efficiency_closed(t, sim.params, sim.deph);
    const double g2_model = g2_cross_closed(t, sim.params, sim.deph);
    const auto noisy = noisy_model(t, sim);
    const double g2_noise = noisy.p_cwr / (noisy.p_cw * noisy.p_r);

    const auto counts = simulate(sim);
    double eta_sim = kNaN;
    double eta_sigma = kNaN;
    if (counts.clicks_w > 0) {
      const double cw = static_cast<double>(counts.clicks_w);
      const double cwr = static_cast<double>(counts.coincidences_wr);
      eta_sim = cwr / cw;
      eta_sigma = std::sqrt(std::max(cwr, 1.0)) / cw;
    }
    const auto g2 = g2_or_nan(counts);
    out.table.add_numbers(
        {t, eta_model, g2_model, g2_noise, eta_sim, eta_sigma, g2.value, g2.sigma});
    eta_points.push_back({t, eta_sim, eta_sigma});
    if (!g2.has(CorrelationEstimate::kOneSided)) g2_points.push_back({t, g2.value, g2.sigma});
  }
  eta_points = usable(eta_points);
  g2_points = usable(g2_points);
  const auto try_fit = [](const std::vector<DataPoint>& points, std::optional<FitResult>& fit,
                           std::string& note) {
    if (points.size() < 4) {
      note = "fewer than four points with coincidences";
      return;
    }
    try {
      fit = fit_gaussian_decay(points);
    } catch (const NumericalError& e) {
      note = e.what();
    }
  };
  try_fit(eta_points, out.eta_ret_fit, out.eta_ret_note);
  try_fit(g2_points, out.g2_fit, out.g2_note);
  out.tau_consistency = kNaN;
  if (out.eta_ret_fit && out.g2_fit) {
    const double s1 = out.eta_ret_fit->sigma("tau");
    const double s2 = out.g2_fit->sigma("tau");
    out.tau_consistency =
        std::abs(out.eta_ret_fit->value("tau") - out.g2_fit->value("tau")) / std::hypot(s1, s2);
  }
  return out;
}

CsvTable table1(const RunConfig& config, unsigned workers) {
  CsvTable table({"row", "P_W (W)", "p", "g2_cwr", "g2_cwr_sigma", "g2_cwcw", "g2_cwcw_sigma",
                  "g2_rr", "g2_rr_sigma", "R", "R_sigma", "significance", "R_published",
                  "R_published_sigma", "significance_published"});
  const bool simulated = config.sweep.table1_mode == "simulated";
  const auto rows = reference::table1();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto params = with_write_power(config, row.write_power);
    CorrelationEstimate x, a, b;
    if (simulated) {
      SimulationConfig sim = point_simulation(config, workers, i, kTable1Tag);
      sim.params = params;
      const auto counts = simulate(sim);
      x = g2_or_nan(counts);
      try {
        a = g2_auto(counts.write_split(), EstimateLabel::g2_auto_w);
        b = g2_auto(counts.read_split(), EstimateLabel::g2_auto_r);
      } catch (const UndefinedEstimate&) {
        a.value = b.value = kNaN;
        a.sigma = b.sigma = kNaN;
      }
    } else {
      x.value = row.g2_cwr.value;
      x.sigma = row.g2_cwr.sigma;
      a.value = row.g2_cwcw.value;
      a.sigma = row.g2_cwcw.sigma;
      b.value = row.g2_rr.value;
      b.sigma = row.g2_rr.sigma;
    }
    double r_value = kNaN, r_sigma = kNaN, significance = kNaN;
    if (std::isfinite(x.value) && a.value > 0.0 && b.value > 0.0) {
      const auto r = cauchy_schwarz_R(x, a, b);
      r_value = r.value;
      r_sigma = r.sigma;
      if (r.sigma > 0.0) significance = violation_significance(r);
    }
    CorrelationEstimate published;
    published.value = row.R.value;
    published.sigma = row.R.sigma;
    table.add_numbers({static_cast<double>(i + 1), row.write_power, params.p, x.value, x.sigma,
                       a.value, a.sigma, b.value, b.sigma, r_value, r_sigma, significance,
                       row.R.value, row.R.sigma, violation_significance(published)});
  }
  return table;
}

LinkBudget link_budget(const RunConfig& config) {
  const auto& link = config.link;
  LinkBudget out{CsvTable({"eta_dev", "equivalent_length_telecom (km)",
                           "equivalent_length_near_infrared (km)"}),
                 CsvTable({"t (s)", "fiber_length (km)"}),
                 crossover_distance(link.eta_dev, link.atten_near, link.atten_telecom),
                 {}};
  for (double eta : link.eta_devs) {
    out.equivalent_lengths.add_numbers({eta, equivalent_fiber_length(eta, link.atten_telecom),
                                        equivalent_fiber_length(eta, link.atten_near)});
  }
  const double v = config.constants.fiber_group_velocity();
  for (double t : link.storage_times) {
    out.storage_distances.add_numbers({t, storage_to_fiber_length(t, v)});
  }
  out.summary += fmt::format("attenuation_telecom (dB/km) = {}\n", format_number(link.atten_telecom));
  out.summary += fmt::format("attenuation_near_infrared (dB/km) = {}\n",
                             format_number(link.atten_near));
  out.summary += fmt::format("eta_dev = {}\n", format_number(link.eta_dev));
  out.summary += fmt::format("equivalent_length (km) = {}\n",
                             format_number(equivalent_fiber_length(link.eta_dev, link.atten_telecom)));
  out.summary += fmt::format(
      "crossover_distance (km) = {}\n",
      out.crossover_km ? format_number(*out.crossover_km) : std::string("none"));
  return out;
}

SimulateResult simulate_once(const RunConfig& config, unsigned workers) {
  const SimulationConfig sim = make_simulation_config(config, workers);
  const auto counts = simulate(sim);
  SimulateResult out{trial_counts_csv_header() + "\n" +
                         trial_counts_csv_row(counts, fnv1a64(serialize_config(config)),
                                              sim.seed) +
                         "\n",
                     CsvTable({"quantity", "value", "sigma", "flags"})};
  const auto add = [&out](const std::string& name, const CorrelationEstimate& e) {
    out.estimates.add_row(
        {name, format_number(e.value), format_number(e.sigma), std::to_string(e.flags)});
  };
  const auto nan_estimate = [] {
    CorrelationEstimate e;
    e.value = e.sigma = kNaN;
    return e;
  };
  const auto guarded = [&](auto&& fn) {
    try {
      return fn();
    } catch (const UndefinedEstimate&) {
      return nan_estimate();
    }
  };
  const auto x = g2_or_nan(counts);
  const auto a = guarded([&] { return g2_auto(counts.write_split(), EstimateLabel::g2_auto_w); });
  const auto b = guarded([&] { return g2_auto(counts.read_split(), EstimateLabel::g2_auto_r); });
  add("g2_cross", x);
  add("g2_auto_w", a);
  add("g2_auto_r", b);
  CorrelationEstimate r = nan_estimate();
  if (std::isfinite(x.value) && a.value > 0.0 && b.value > 0.0) r = cauchy_schwarz_R(x, a, b);
  add("R", r);
  const auto e = empirical_probabilities(counts);
  const auto plain = [](double v) {
    CorrelationEstimate c;
    c.value = v;
    c.sigma = kNaN;
    return c;
  };
  add("p_cw", plain(e.p_cw));
  add("p_r", plain(e.p_r));
  add("p_cwr", plain(e.p_cwr));
  add("eta_ret", plain(e.p_cw > 0.0 ? e.p_cwr / e.p_cw : kNaN));
  return out;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"qfc-curve", "snr-curve",  "correlations",
                                                 "storage-decay", "table1", "link-budget",
                                                 "simulate"};
  return names;
}

std::vector<Output> run_subcommand(const std::string& subcommand, const RunConfig& config,
                                   unsigned workers) {
  workers = std::max(1u, workers);
  if (subcommand == "qfc-curve") return {{"qfc_curve.csv", qfc_curve(config).str()}};
  if (subcommand == "snr-curve") {
    const auto r = snr_curve(config, workers);
    return {{"snr_curve.csv", r.table.str()}, {"snr_fit.csv", fit_result_report(r.slope_fit)}};
  }
  if (subcommand == "correlations") {
    return {{"correlations.csv", correlations(config, workers).str()}};
  }
  if (subcommand == "storage-decay") {
    const auto r = storage_decay(config, workers);
    std::string fit = "observable,parameter,value,sigma\n";
    fit += fit_rows("eta_ret", r.eta_ret_fit, r.eta_ret_note);
    fit += fit_rows("g2", r.g2_fit, r.g2_note);
    fit += fmt::format("tau,consistency (sigma),{},\n", format_number(r.tau_consistency));
    return {{"storage_decay.csv", r.table.str()}, {"storage_decay_fit.csv", fit}};
  }
  if (subcommand == "table1") return {{"table1.csv", table1(config, workers).str()}};
  if (subcommand == "link-budget") {
    const auto r = link_budget(config);
    return {{"link_equivalent_length.csv", r.equivalent_lengths.str()},
            {"link_storage_distance.csv", r.storage_distances.str()},
            {"link_budget.txt", r.summary}};
  }
  if (subcommand == "simulate") {
    const auto r = simulate_once(config, workers);
    return {{"simulate_counts.csv", r.counts_csv}, {"simulate_estimates.csv", r.estimates.str()}};
  }
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

}  // namespace qmqfc::repro
