#include "semscale/report/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "semscale/error.hpp"

namespace semscale::report {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& v) {
  std::istringstream is(v);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

long long to_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(s);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, std::size_t N, class F>
std::array<T, N> triple(const std::string& v, F conv) {
  const auto w = words(v);
  if (w.size() != N) throw std::invalid_argument(v);
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = conv(w[i]);
  return out;
}

} // namespace

std::string to_string(sim::TimingMode mode) { return mode == sim::TimingMode::Modeled ? "modeled" : "measured"; }

sim::TimingMode parse_mode(std::string_view name) {
  if (name == "modeled") return sim::TimingMode::Modeled;
  if (name == "measured") return sim::TimingMode::Measured;
  throw InvalidArgument("unknown mode: " + std::string(name));
}

void ExperimentConfig::validate() const {
  for (int e : elements)
    if (e < 1) throw InvalidArgument("config: element counts must be >= 1");
  for (double b : box)
    if (!(b > 0.0)) throw InvalidArgument("config: box lengths must be positive");
  if (n_per_dir < 2) throw InvalidArgument("config: n_per_dir must be >= 2");
  if (k < 1 || k > 3) throw InvalidArgument("config: k must be 1, 2 or 3");
  if (!(dt > 0.0) || !(reynolds > 0.0)) throw InvalidArgument("config: dt and reynolds must be positive");
  if (projection < 0) throw InvalidArgument("config: projection must be >= 0");
  if (warmup < 0) throw InvalidArgument("config: warmup must be >= 0");
  if (window < 1) throw InvalidArgument("config: window must be >= 1");
  if (!(pressure_tolerance > 0.0) || !(velocity_tolerance > 0.0)) throw InvalidArgument("config: tolerances must be positive");
  if (restart < 1 || max_iterations < 1) throw InvalidArgument("config: restart and max_iterations must be >= 1");
  if (backends.empty()) throw InvalidArgument("config: no coarse backend");
  if (ranks.empty()) throw InvalidArgument("config: empty rank sweep");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] < 1 || ranks[i] > num_elements()) throw InvalidArgument("config: ranks must lie in 1..E");
    if (i > 0 && ranks[i] <= ranks[i - 1]) throw InvalidArgument("config: ranks must increase strictly");
  }
  if (noise.enabled && (!(noise.probability >= 0.0) || noise.probability > 1.0 || !(noise.multiplier >= 1.0)))
    throw InvalidArgument("config: noise probability must be in [0,1] and multiplier >= 1");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> keys{
      {"mesh.elements", [&](const std::string& v) { c.elements = triple<int, 3>(v, [](auto& s) { return static_cast<int>(to_int(s)); }); }},
      {"mesh.box", [&](const std::string& v) { c.box = triple<double, 3>(v, to_double); }},
      {"mesh.periodic", [&](const std::string& v) { c.periodic = triple<bool, 3>(v, to_bool); }},
      {"mesh.n_per_dir", [&](const std::string& v) { c.n_per_dir = static_cast<int>(to_int(v)); }},
      {"scheme.flow", [&](const std::string& v) { c.flow = v; }},
      {"scheme.k", [&](const std::string& v) { c.k = static_cast<int>(to_int(v)); }},
      {"scheme.dt", [&](const std::string& v) { c.dt = to_double(v); }},
      {"scheme.reynolds", [&](const std::string& v) { c.reynolds = to_double(v); }},
      {"scheme.projection", [&](const std::string& v) { c.projection = static_cast<int>(to_int(v)); }},
      {"scheme.warmup", [&](const std::string& v) { c.warmup = static_cast<int>(to_int(v)); }},
      {"scheme.window", [&](const std::string& v) { c.window = static_cast<int>(to_int(v)); }},
      {"solver.pressure_tolerance", [&](const std::string& v) { c.pressure_tolerance = to_double(v); }},
      {"solver.velocity_tolerance", [&](const std::string& v) { c.velocity_tolerance = to_double(v); }},
      {"solver.restart", [&](const std::string& v) { c.restart = static_cast<int>(to_int(v)); }},
      {"solver.max_iterations", [&](const std::string& v) { c.max_iterations = static_cast<int>(to_int(v)); }},
      {"solver.coarse",
       [&](const std::string& v) {
         if (v == "both") {
           c.backends = {solvers::CoarseBackend::Xxt, solvers::CoarseBackend::Amg};
         } else {
           c.backends.clear();
           for (const auto& w : words(v)) c.backends.push_back(solvers::parse_coarse_backend(w));
         }
       }},
      {"solver.local",
       [&](const std::string& v) {
         if (v == "fdm") c.local = solvers::LocalSolver::FastDiagonalization;
         else if (v == "dense") c.local = solvers::LocalSolver::Dense;
         else throw std::invalid_argument(v);
       }},
      {"machine.profile", [&](const std::string& v) { c.profile = v; }},
      {"machine.mode", [&](const std::string& v) { c.mode = parse_mode(v); }},
      {"machine.seed", [&](const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int(v)); }},
      {"machine.noise", [&](const std::string& v) { c.noise.enabled = to_bool(v); }},
      {"machine.noise_probability", [&](const std::string& v) { c.noise.probability = to_double(v); }},
      {"machine.noise_multiplier", [&](const std::string& v) { c.noise.multiplier = to_double(v); }},
      {"sweep.ranks",
       [&](const std::string& v) {
         c.ranks.clear();
         for (const auto& w : words(v)) c.ranks.push_back(static_cast<int>(to_int(w)));
       }},
  };
  std::string section, line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw IoError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "mesh" && section != "scheme" && section != "solver" && section != "machine" && section != "sweep")
        throw IoError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(where + "expected key = value");
    if (section.empty()) throw IoError(where + "key outside a section");
    const auto key = section + "." + trim(line.substr(0, eq));
    const auto it = keys.find(key);
    if (it == keys.end()) throw IoError(where + "unknown key " + key);
    try {
      it->second(trim(line.substr(eq + 1)));
    } catch (const std::exception&) {
      throw IoError(where + "bad value for " + key);
    }
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_config(in);
}

void write_config(std::ostream& os, const ExperimentConfig& c) {
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "[mesh]\n"
     << "elements = " << c.elements[0] << " " << c.elements[1] << " " << c.elements[2] << "\n"
     << "box = " << fmt(c.box[0]) << " " << fmt(c.box[1]) << " " << fmt(c.box[2]) << "\n"
     << "periodic = " << b(c.periodic[0]) << " " << b(c.periodic[1]) << " " << b(c.periodic[2]) << "\n"
     << "n_per_dir = " << c.n_per_dir << "\n\n[scheme]\n"
     << "flow = " << c.flow << "\n"
     << "k = " << c.k << "\n"
     << "dt = " << fmt(c.dt) << "\n"
     << "reynolds = " << fmt(c.reynolds) << "\n"
     << "projection = " << c.projection << "\n"
     << "warmup = " << c.warmup << "\n"
     << "window = " << c.window << "\n\n[solver]\n"
     << "pressure_tolerance = " << fmt(c.pressure_tolerance) << "\n"
     << "velocity_tolerance = " << fmt(c.velocity_tolerance) << "\n"
     << "restart = " << c.restart << "\n"
     << "max_iterations = " << c.max_iterations << "\n"
     << "coarse =";
  for (auto be : c.backends) os << " " << solvers::to_string(be);
  os << "\nlocal = " << (c.local == solvers::LocalSolver::Dense ? "dense" : "fdm") << "\n\n[machine]\n"
     << "profile = " << c.profile << "\n"
     << "mode = " << to_string(c.mode) << "\n"
     << "seed = " << c.seed << "\n"
     << "noise = " << b(c.noise.enabled) << "\n"
     << "noise_probability = " << fmt(c.noise.probability) << "\n"
     << "noise_multiplier = " << fmt(c.noise.multiplier) << "\n\n[sweep]\nranks =";
  for (int r : c.ranks) os << " " << r;
  os << "\n";
}

std::string config_text(const ExperimentConfig& config) {
  std::ostringstream os;
  write_config(os, config);
  return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace semscale::report
