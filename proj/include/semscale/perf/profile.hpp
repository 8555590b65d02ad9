#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "semscale/sim/comm_model.hpp"

namespace semscale::perf {

/// Machine parameters in the units of the usual ping-pong tables.
struct MachineProfile {
  std::string name;
  double alpha_star_us = 0.0;
  double beta_star_us_per_word = 0.0;
  double ta_us = 0.0;

  [[nodiscard]] sim::CommModel comm_model() const;
};

/// key = value lines (name, alpha_star_us, beta_star_us_per_word, ta_us);
/// '#' starts a comment. Throws IoError on malformed or missing keys.
MachineProfile read_profile(std::istream& is);
void write_profile(std::ostream& os, const MachineProfile& profile);

/// "mira", "titan" or "beskow"; throws InvalidArgument otherwise.
MachineProfile builtin_profile(std::string_view name);

/// Built-in name or path to a profile file.
MachineProfile load_profile(const std::string& name_or_path);

} // namespace semscale::perf
