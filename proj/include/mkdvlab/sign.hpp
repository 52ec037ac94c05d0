#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mkdvlab {

/// Branch of the cubic nonlinearity: defocusing is the + sign, focusing the - sign.
enum class Sign { defocusing, focusing };

inline double sign_value(Sign s) { return s == Sign::defocusing ? 1.0 : -1.0; }

inline std::string to_string(Sign s) { return s == Sign::defocusing ? "defocusing" : "focusing"; }

inline Sign parse_sign(std::string_view text) {
  if (text == "defocusing" || text == "+" || text == "+1") return Sign::defocusing;
  if (text == "focusing" || text == "-" || text == "-1") return Sign::focusing;
  throw std::invalid_argument("unknown sign '" + std::string(text) + "'");
}

}  // namespace mkdvlab
