#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qmqfc/errors.hpp"
#include "qmqfc/repro.hpp"

namespace qmqfc::repro {

namespace {

namespace fs = std::filesystem;

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoFailure("failed writing '" + path.string() + "'");
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["subcommand"] = m.subcommand;
  j["config_path"] = m.config_path;
  j["seed"] = m.seed;
  j["out_dir"] = m.out_dir;
  j["tool_version"] = m.tool_version;
  j["config_hash"] = m.config_hash;
  j["trials"] = m.trials ? nlohmann::ordered_json(*m.trials) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.out_dir = j.at("out_dir").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    if (j.contains("trials") && !j.at("trials").is_null()) {
      m.trials = j.at("trials").get<std::uint64_t>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

int execute(const Invocation& inv, std::ostream& err) {
  try {
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), inv.subcommand) == names.end()) {
      err << "error: unknown subcommand '" << inv.subcommand << "'\n";
      return kUsageError;
    }
    const std::string bytes = inv.config_path ? read_bytes(*inv.config_path) : std::string();
    RunConfig config = parse_config(bytes);
    if (inv.seed) config.simulation.seed = *inv.seed;
    if (inv.trials) {
      if (*inv.trials == 0) throw ConfigError("--trials must be positive");
      config.simulation.trials = *inv.trials;
    }

    RunManifest manifest;
    manifest.subcommand = inv.subcommand;
    manifest.config_path = inv.config_path ? inv.config_path->string() : std::string();
    manifest.seed = config.simulation.seed;
    manifest.out_dir = inv.out_dir.string();
    manifest.config_hash = hash_hex(fnv1a64(bytes));
    manifest.trials = inv.trials;

    std::error_code ec;
    fs::create_directories(inv.out_dir, ec);
    if (ec) throw IoFailure("cannot create '" + inv.out_dir.string() + "': " + ec.message());
    write_file(inv.out_dir / "manifest.json", manifest_json(manifest));

    for (const auto& output : run_subcommand(inv.subcommand, config, inv.workers)) {
      write_file(inv.out_dir / output.filename, output.content);
    }
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UndefinedEstimate& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const IoFailure& e) {
    err << "i/o failure: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o failure: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

int replay(const fs::path& manifest_path, const std::optional<fs::path>& out_override,
           unsigned workers, std::ostream& err) {
  Invocation inv;
  try {
    const auto m = parse_manifest(read_bytes(manifest_path));
    if (!m.config_path.empty()) {
      const auto bytes = read_bytes(m.config_path);
      if (hash_hex(fnv1a64(bytes)) != m.config_hash) {
        throw ConfigError("config '" + m.config_path + "' changed since the manifest was written");
      }
      inv.config_path = m.config_path;
    } else if (m.config_hash != hash_hex(fnv1a64(""))) {
      throw ConfigError("manifest records a config hash but no config path");
    }
    if (m.tool_version != kToolVersion) {
      err << "warning: manifest written by version " << m.tool_version << ", running "
          << kToolVersion << "\n";
    }
    inv.subcommand = m.subcommand;
    inv.seed = m.seed;
    inv.trials = m.trials;
    inv.out_dir = out_override.value_or(fs::path(m.out_dir));
    inv.workers = workers;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return execute(inv, err);
}

}  // namespace qmqfc::repro
