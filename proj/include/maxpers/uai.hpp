#pragma once

#include <string>

#include "maxpers/model.hpp"

namespace maxpers {

struct UaiParseError : std::runtime_error {
  UaiParseError(const std::string& msg, int line)
      : std::runtime_error("uai parse error, line " + std::to_string(line) + ": " + msg),
        line(line) {}
  int line;
};

// UAI-MARKOV subset: unary and pairwise factors only, costs read as energies
// (no exponential transform). '#' starts a comment. Repeated scopes
// accumulate; an empty scope carries the constant term. Sets the integer
// flag when every parsed number is integral.
GraphicalModel parse_uai(const std::string& text);

std::string serialize_uai(const GraphicalModel& f);

GraphicalModel load_uai_file(const std::string& path);
void save_uai_file(const GraphicalModel& f, const std::string& path);

}  // namespace maxpers
