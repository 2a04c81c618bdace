#include <iostream>
#include <optional>
#include <string>

#include <CLI/CLI.hpp>

#include "qmqfc/repro.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string out = "out";
  unsigned workers = 1;
};

const char* describe(const std::string& name) {
  if (name == "qfc-curve") return "converter efficiency, noise and SNR versus pump power";
  if (name == "snr-curve") return "SNR versus input photon number, simulated and fitted";
  if (name == "correlations") return "g2 versus write power with and without conversion noise";
  if (name == "storage-decay") return "retrieval efficiency and g2 versus storage time";
  if (name == "table1") return "Cauchy-Schwarz parameters from published or simulated data";
  if (name == "link-budget") return "equivalent fiber lengths and crossover distance";
  return "single event-level simulation";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum memory + frequency conversion reproduction tool"};
  app.set_version_flag("--version", qmqfc::repro::kToolVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  std::string selected;
  for (const auto& name : qmqfc::repro::subcommands()) {
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", flags.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "random seed (overrides simulation.seed)");
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--workers", flags.workers, "worker threads; never changes output")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
    sub->add_option("--trials", flags.trials, "trials per simulation (overrides simulation.trials)")
        ->check(CLI::PositiveNumber);
    sub->callback([&selected, name] { selected = name; });
  }

  std::string manifest;
  std::string replay_out;
  unsigned replay_workers = 1;
  auto* replay = app.add_subcommand("replay", "re-run the invocation recorded in a manifest");
  replay->add_option("--manifest", manifest, "manifest.json of a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "output directory (default: the recorded one)");
  replay->add_option("--workers", replay_workers, "worker threads")->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qmqfc::repro::kUsageError;
  }

  if (replay->parsed()) {
    std::optional<std::filesystem::path> out;
    if (!replay_out.empty()) out = replay_out;
    return qmqfc::repro::replay(manifest, out, replay_workers, std::cerr);
  }

  qmqfc::repro::Invocation inv;
  inv.subcommand = selected;
  for (auto* sub : app.get_subcommands()) {
    if (sub->get_name() != selected) continue;
    if (sub->count("--config") > 0) inv.config_path = flags.config;
    if (sub->count("--seed") > 0) inv.seed = flags.seed;
    if (sub->count("--trials") > 0) inv.trials = flags.trials;
  }
  inv.out_dir = flags.out;
  inv.workers = flags.workers;
  return qmqfc::repro::execute(inv, std::cerr);
}
