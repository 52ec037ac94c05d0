#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mkdvlab {

/// Malformed, unknown or out-of-range configuration. The CLI maps it to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A validated run description. params holds every parameter of the experiment, with
/// defaults filled in, in schema order.
struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;  // output root; empty selects the default
  nlohmann::ordered_json params = nlohmann::ordered_json::object();

  /// The echo written next to the outputs: experiment, seed, workers, out, then params.
  nlohmann::ordered_json resolved() const;

  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
};

std::vector<std::string> experiment_names();

/// Default parameters of an experiment (without the common keys).
nlohmann::ordered_json experiment_defaults(const std::string& experiment);

/// Rejects unknown keys and mistyped values; fills defaults.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace mkdvlab
