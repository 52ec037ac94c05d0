#include "mkdvlab/result.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace mkdvlab {

std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool ExperimentResult::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void ExperimentResult::add(std::string n, double value, double se, bool exact) {
  scalars.push_back({std::move(n), value, se, exact});
}

void ExperimentResult::check(std::string n, bool ok, std::string detail) {
  checks.push_back({std::move(n), ok, std::move(detail)});
}

const Scalar& ExperimentResult::scalar(const std::string& n) const {
  for (const auto& s : scalars)
    if (s.name == n) return s;
  throw std::out_of_range("no scalar named " + n);
}

nlohmann::ordered_json ExperimentResult::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["parameters"] = parameters;
  auto& out = j["outputs"] = nlohmann::ordered_json::object();
  for (const auto& s : scalars) {
    nlohmann::ordered_json v;
    v["value"] = s.value;
    if (s.exact)
      v["exact"] = true;
    else
      v["stderr"] = s.stderr_;
    out[s.name] = v;
  }
  auto& cj = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) cj.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  auto& fj = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : failures) fj.push_back({{"index", f.index}, {"message", f.message}});
  j["passed"] = passed();
  return j;
}

std::string ExperimentResult::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace mkdvlab
