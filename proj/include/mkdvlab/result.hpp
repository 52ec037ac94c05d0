#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mkdvlab/ensemble.hpp"

namespace mkdvlab {

/// A named output. Monte Carlo values carry a standard error; closed-form ones are tagged exact.
struct Scalar {
  std::string name;
  double value = 0.0;
  double stderr_ = 0.0;
  bool exact = false;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<Scalar> scalars;
  std::vector<Check> checks;
  std::vector<SampleFailure> failures;
  double wall_clock = 0.0;  // seconds; kept out of to_json and to_csv

  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool passed() const;
  void add(std::string name, double value, double stderr_ = 0.0, bool exact = false);
  void check(std::string name, bool ok, std::string detail = {});
  const Scalar& scalar(const std::string& name) const;

  /// Everything except wall_clock, so reruns serialize identically.
  nlohmann::ordered_json to_json() const;
  /// Flat table: the column header then one line per row. Contains no timing data.
  std::string to_csv() const;
};

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace mkdvlab
