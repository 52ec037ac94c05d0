#include "mkdvlab/config.hpp"

#include <algorithm>
#include <fstream>

namespace mkdvlab {

namespace {

using ojson = nlohmann::ordered_json;

const std::vector<std::pair<std::string, ojson>>& schema() {
  static const std::vector<std::pair<std::string, ojson>> table = {
      {"sample", {{"N", 8}, {"samples", 1000}, {"sign", "defocusing"}, {"R", 4.0}, {"band", -1}}},
      {"evolve",
       {{"N", 8},
        {"sign", "defocusing"},
        {"equation", "mkdv2"},
        {"dt", 1e-3},
        {"tol", 1e-9},
        {"t_final", 1.0},
        {"intervals", 10},
        {"data", "gaussian"},
        {"index", 0},
        {"mode", 1},
        {"amplitude", 0.5},
        {"growth_t_max", 0.0},
        {"growth_intervals", 100}}},
      {"conservation",
       {{"N", 8},
        {"sign", "defocusing"},
        {"t_final", 0.5},
        {"samples", 4},
        {"tol", 1e-9},
        {"intervals", 50000},
        {"single_mode", false},
        {"e3_tolerance", 1e-6}}},
      {"e3star-decay",
       {{"N_grid", {8, 16, 32, 64}},
        {"R", 4.0},
        {"samples", 20000},
        {"chi_on", true},
        {"band", -1},
        {"max_slope", -0.3},
        {"exact_max_N", 3}}},
      {"invariance",
       {{"N_grid", {8, 16, 32}},
        {"R", 4.0},
        {"sign", "defocusing"},
        {"t", 0.5},
        {"samples", 20000},
        {"tol", 1e-5},
        {"dt", 1e-3},
        {"sets", ojson::array({ojson{{"kind", "whole"}}, ojson{{"kind", "e1_ball"}, {"r", 4.0}}})},
        {"trend_level", 0.1}}},
      {"pairing-lemmas",
       {{"enum_N_grid", {1, 2, 4, 8, 16, 32, 64}},
        {"cancel_N", 8},
        {"cancel_draws", 100},
        {"lemma_N_grid", {16, 32, 64, 128, 256, 512}},
        {"bounded_ratio", 10.0}}},
      {"convergence",
       {{"N_grid", {8, 16, 32, 64}},
        {"s", 0.9},
        {"s_prime", 0.5},
        {"p", 4.0},
        {"T", 0.2},
        {"intervals", 20},
        {"amplitude", 1.0},
        {"tol", 1e-9},
        {"sign", "defocusing"}}},
      {"tails",
       {{"N", 16}, {"samples", 10000}, {"lambdas", {1.0, 1.5, 2.0}}, {"s", 0.0}, {"p", 2.0}, {"gn_samples", 1000}}},
      {"density-moments",
       {{"N_grid", {8, 16, 32}}, {"sign", "focusing"}, {"R", 4.0}, {"q", 2.0}, {"samples", 10000}}},
      {"gauge-check",
       {{"N", 8},
        {"sign", "defocusing"},
        {"t_final", 0.5},
        {"checkpoints", 5},
        {"delta", 1e-4},
        {"tol", 1e-11},
        {"index", 0},
        {"max_residual", 1e-6}}},
  };
  return table;
}

const std::vector<std::string> common_keys = {"experiment", "seed", "workers", "out"};

bool same_kind(const ojson& def, const nlohmann::json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  return false;
}

std::string kind_name(const ojson& def) {
  if (def.is_boolean()) return "a boolean";
  if (def.is_string()) return "a string";
  if (def.is_number_integer()) return "an integer";
  if (def.is_number()) return "a number";
  if (def.is_array()) return "an array";
  return "an object";
}

ojson check_sets(const nlohmann::json& v) {
  if (!v.is_array() || v.empty()) throw config_error("'sets' must be a non-empty array of objects");
  ojson out = ojson::array();
  for (const auto& item : v) {
    if (!item.is_object()) throw config_error("'sets' entries must be objects");
    ojson set;
    for (const auto& [k, val] : item.items()) {
      if (k == "kind") {
        if (!val.is_string()) throw config_error("set 'kind' must be a string");
        const auto kind = val.get<std::string>();
        if (kind != "whole" && kind != "e1_ball" && kind != "fl_ball" && kind != "half_space")
          throw config_error("unknown set kind '" + kind + "'");
      } else if (k == "r" || k == "s" || k == "p") {
        if (!val.is_number()) throw config_error("set '" + k + "' must be a number");
      } else if (k == "n0") {
        if (!val.is_number_integer()) throw config_error("set 'n0' must be an integer");
      } else {
        throw config_error("unknown key '" + k + "' in set");
      }
    }
    if (!item.contains("kind")) throw config_error("set without 'kind'");
    for (const char* k : {"kind", "r", "s", "p", "n0"})
      if (item.contains(k)) set[k] = item[k];
    out.push_back(set);
  }
  return out;
}

ojson check_value(const std::string& key, const ojson& def, const nlohmann::json& v) {
  if (key == "sets") return check_sets(v);
  if (def.is_array()) {
    if (!v.is_array() || v.empty()) throw config_error("'" + key + "' must be a non-empty array");
    for (const auto& e : v)
      if (!same_kind(def.front(), e))
        throw config_error("'" + key + "' entries must be " + kind_name(def.front()) + "s");
    return ojson(v);
  }
  if (!same_kind(def, v)) throw config_error("'" + key + "' must be " + kind_name(def));
  return ojson(v);
}

const ojson& param(const RunConfig& c, const std::string& key) {
  auto it = c.params.find(key);
  if (it == c.params.end()) throw config_error("experiment '" + c.experiment + "' has no parameter '" + key + "'");
  return *it;
}

}  // namespace

ojson RunConfig::resolved() const {
  ojson j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out"] = out;
  for (const auto& [k, v] : params.items()) j[k] = v;
  return j;
}

int RunConfig::get_int(const std::string& key) const { return param(*this, key).get<int>(); }
std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const auto& v = param(*this, key);
  if (v.is_number_integer() && v.get<long long>() < 0) throw config_error("'" + key + "' must be non-negative");
  return v.get<std::uint64_t>();
}
double RunConfig::get_double(const std::string& key) const { return param(*this, key).get<double>(); }
bool RunConfig::get_bool(const std::string& key) const { return param(*this, key).get<bool>(); }
std::string RunConfig::get_string(const std::string& key) const { return param(*this, key).get<std::string>(); }
std::vector<int> RunConfig::get_ints(const std::string& key) const { return param(*this, key).get<std::vector<int>>(); }
std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  return param(*this, key).get<std::vector<double>>();
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : schema()) names.push_back(name);
  return names;
}

ojson experiment_defaults(const std::string& experiment) {
  for (const auto& [name, defaults] : schema())
    if (name == experiment) return defaults;
  std::string known;
  for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw config_error("unknown experiment '" + experiment + "' (known: " + known + ")");
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("configuration must be a JSON object");
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw config_error("configuration needs a string 'experiment'");
  RunConfig c;
  c.experiment = j["experiment"].get<std::string>();
  const ojson defaults = experiment_defaults(c.experiment);

  for (const auto& [k, v] : j.items()) {
    if (std::find(common_keys.begin(), common_keys.end(), k) != common_keys.end()) continue;
    if (!defaults.contains(k)) throw config_error("unknown key '" + k + "' for experiment '" + c.experiment + "'");
  }
  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw config_error("'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<long long>() < 1 || j["workers"].get<long long>() > 1024)
      throw config_error("'workers' must be an integer in [1, 1024]");
    c.workers = j["workers"].get<int>();
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw config_error("'out' must be a string");
    c.out = j["out"].get<std::string>();
  }
  for (const auto& [k, def] : defaults.items())
    c.params[k] = j.contains(k) ? check_value(k, def, j[k]) : def;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open configuration " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("configuration " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace mkdvlab
