#include "semscale/perf/profile.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "semscale/error.hpp"

namespace semscale::perf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

sim::CommModel MachineProfile::comm_model() const {
  return {alpha_star_us * 1e-6, beta_star_us_per_word * 1e-6, ta_us * 1e-6, {}};
}

MachineProfile read_profile(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("profile line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  MachineProfile p;
  p.name = kv.count("name") ? kv["name"] : "custom";
  auto number = [&](const char* key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw IoError(std::string("profile: missing ") + key);
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size() || !(v > 0.0)) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw IoError(std::string("profile: bad value for ") + key);
    }
  };
  p.alpha_star_us = number("alpha_star_us");
  p.beta_star_us_per_word = number("beta_star_us_per_word");
  p.ta_us = number("ta_us");
  for (const auto& [k, v] : kv)
    if (k != "name" && k != "alpha_star_us" && k != "beta_star_us_per_word" && k != "ta_us")
      throw IoError("profile: unknown key " + k);
  return p;
}

void write_profile(std::ostream& os, const MachineProfile& p) {
  os << "name = " << p.name << "\n"
     << "alpha_star_us = " << p.alpha_star_us << "\n"
     << "beta_star_us_per_word = " << p.beta_star_us_per_word << "\n"
     << "ta_us = " << p.ta_us << "\n";
}

MachineProfile builtin_profile(std::string_view name) {
  if (name == "mira") return {"mira", 4.0, 5e-3, 1.1e-3};
  if (name == "titan") return {"titan", 2.25, 1.42e-3, 6.5e-4};
  if (name == "beskow") return {"beskow", 2.55, 8.25e-4, 1.5e-4};
  throw InvalidArgument("unknown machine profile: " + std::string(name));
}

MachineProfile load_profile(const std::string& name_or_path) {
  if (name_or_path == "mira" || name_or_path == "titan" || name_or_path == "beskow") return builtin_profile(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) throw IoError("cannot open profile " + name_or_path);
  return read_profile(in);
}

} // namespace semscale::perf
