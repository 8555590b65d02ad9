#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "semscale/error.hpp"
#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/perf/pingpong.hpp"
#include "semscale/perf/profile.hpp"
#include "semscale/perf/scaling.hpp"
#include "semscale/perf/ta_bench.hpp"
#include "semscale/report/config.hpp"
#include "semscale/report/experiment.hpp"
#include "semscale/report/output.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sim/cluster.hpp"
#include "semscale/time/flow.hpp"

using namespace semscale;
namespace fs = std::filesystem;

namespace {

struct Shared {
  std::string config;
  std::string profile;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string mode;
};

void add_shared(CLI::App* sub, Shared& s) {
  sub->add_option("--config", s.config, "experiment config file")->check(CLI::ExistingFile);
  sub->add_option("--profile", s.profile, "machine profile file or builtin name (mira, titan, beskow)");
  sub->add_option("--out", s.out, "output directory");
  sub->add_option_function<std::uint64_t>(
      "--seed", [&s](std::uint64_t v) { s.seed = v;
        s.seed_set = true; }, "random seed");
  sub->add_option("--mode", s.mode, "timing mode")->check(CLI::IsMember({"modeled", "measured"}));
}

report::ExperimentConfig resolve_config(const Shared& s) {
  auto c = s.config.empty() ? report::ExperimentConfig{} : report::load_config(s.config);
  if (s.seed_set) c.seed = s.seed;
  if (!s.mode.empty()) c.mode = report::parse_mode(s.mode);
  if (!s.profile.empty()) c.profile = s.profile;
  return c;
}

perf::MachineProfile resolve_profile(const Shared& s, const report::ExperimentConfig* c = nullptr) {
  if (!s.profile.empty()) return perf::load_profile(s.profile);
  return perf::load_profile(c ? c->profile : "mira");
}

// Opens <out>/<name>, or returns nullptr when no output directory was given.
std::unique_ptr<std::ofstream> open_out(const Shared& s, const std::string& name) {
  if (s.out.empty()) return nullptr;
  fs::create_directories(s.out);
  auto f = std::make_unique<std::ofstream>(fs::path(s.out) / name);
  if (!*f) throw IoError("cannot write " + (fs::path(s.out) / name).string());
  return f;
}

mesh::HexMesh config_mesh(const report::ExperimentConfig& c) {
  return mesh::build_box_mesh(c.elements[0], c.elements[1], c.elements[2], c.box, c.periodic);
}

int cmd_mesh(const Shared& s, const std::vector<int>& elements, double mem_per_rank) {
  auto c = resolve_config(s);
  if (!elements.empty()) c.elements = {elements[0], elements[1], elements[2]};
  const auto m = config_mesh(c);
  const auto e = static_cast<std::uint64_t>(m.num_elements());
  const auto n = perf::gridpoints(e, c.n_per_dir);
  std::printf("elements %llu\nvertices %d\nn_per_dir %d\ngridpoints %llu\nmemory_bytes %llu\n",
              static_cast<unsigned long long>(e), m.num_vertices(), c.n_per_dir, static_cast<unsigned long long>(n),
              static_cast<unsigned long long>(perf::memory_footprint(n)));
  if (mem_per_rank > 0)
    std::printf("min_ranks %llu\n", static_cast<unsigned long long>(perf::min_ranks(n, mem_per_rank, e)));
  if (auto f = open_out(s, "mesh.txt")) mesh::write_mesh(*f, m);
  return 0;
}

int cmd_partition(const Shared& s, int ranks, const std::string& method, long long count) {
  mesh::Partition part;
  if (count > 0) {
    part = mesh::block_partition(static_cast<int>(count), ranks);
  } else {
    const auto m = config_mesh(resolve_config(s));
    if (method == "rsb") part = mesh::recursive_spectral_bisection(m, ranks);
    else if (method == "coordinate") part = mesh::coordinate_bisection(m, ranks);
    else part = mesh::block_partition(m.num_elements(), ranks);
    std::printf("edge_cut %zu\n", mesh::edge_cut(mesh::element_adjacency(m), part));
  }
  const auto hist = mesh::partition_histogram(part);
  std::printf("load ranks\n");
  for (const auto& [load, n] : hist) std::printf("%d %d\n", load, n);
  if (auto f = open_out(s, "partition.txt")) mesh::write_partition(*f, part);
  if (auto f = open_out(s, "histogram.svg"))
    report::emit_histogram_svg(*f, hist, "Elements per rank, P = " + std::to_string(ranks));
  return 0;
}

int cmd_solve(const Shared& s, int steps) {
  const auto c = resolve_config(s);
  c.validate();
  const auto profile = resolve_profile(s, &c);
  const auto m = config_mesh(c);
  const auto num = mesh::build_numbering(m, c.n_per_dir);
  const auto basis = sem::make_reference_basis(c.n_per_dir);
  const auto flow = time::make_flow_case(c.flow, c.reynolds);
  auto model = profile.comm_model();
  model.noise = c.noise;
  sim::Cluster cluster(num, model, c.mode);
  for (int p : c.ranks) cluster.attach(mesh::recursive_spectral_bisection(m, p), sim::mix_seed(c.seed, 0, p));
  time::SolverSettings settings;
  settings.schwarz.coarse = c.backends.front();
  settings.schwarz.local = c.local;
  settings.projection = c.projection;
  settings.pressure_tolerance = c.pressure_tolerance;
  settings.velocity_tolerance = c.velocity_tolerance;
  settings.restart = c.restart;
  settings.max_iterations = c.max_iterations;
  time::FlowSolver solver(m, num, basis, cluster, time::TimeScheme::make(c.k, c.dt, c.reynolds), settings, flow.forcing);
  auto state = solver.initial_state(flow.initial);
  const int total = steps > 0 ? steps : c.warmup + c.window;
  std::vector<time::StepReport> reports;
  for (int i = 1; i <= total; ++i) {
    const double before = cluster.ranks(0).timing().mean_total();
    auto r = solver.advance(state);
    r.model_seconds = cluster.ranks(0).timing().mean_total() - before;
    reports.push_back(r);
  }
  if (auto f = open_out(s, "steps.csv")) time::write_step_csv(*f, reports);
  else time::write_step_csv(std::cout, reports);
  if (flow.exact)
    std::printf("# velocity_error %.9g at t=%.9g\n", time::velocity_error(num, state.u.front(), flow.exact, state.t),
                state.t);
  for (int i = 0; i < cluster.num_attached(); ++i) {
    const auto t = cluster.ranks(i).timing();
    std::printf("# P=%d T_a=%.9g T_c=%.9g\n", cluster.ranks(i).num_ranks(), t.mean_t_a(), t.mean_t_c());
    if (auto f = open_out(s, "timing_P" + std::to_string(cluster.ranks(i).num_ranks()) + ".csv"))
      sim::write_timing_csv(*f, t, cluster.ranks(i).log);
  }
  return 0;
}

int cmd_scale(const Shared& s) {
  const auto c = resolve_config(s);
  const auto profile = resolve_profile(s, &c);
  const auto r = report::run_scaling_experiment(c, profile);
  if (s.out.empty()) {
    report::emit_csv(std::cout, r);
  } else {
    report::write_artifacts(r, s.out);
  }
  for (const auto& b : r.backends) {
    if (b.strong.reached)
      std::fprintf(stderr, "%s: crossover P=%.4g N/P=%.4g (between P=%d and P=%d)\n", b.backend.c_str(),
                   b.strong.crossover_p, b.strong.n_per_p, b.strong.p_lo, b.strong.p_hi);
    else
      std::fprintf(stderr, "%s: crossover not reached\n", b.backend.c_str());
  }
  return 0;
}

int cmd_pingpong(const Shared& s, const std::string& transport, int reps, double noise, int max_log2) {
  perf::PingPongOptions o;
  o.transport = perf::parse_transport(transport);
  o.reps = reps;
  o.noise = noise;
  o.seed = s.seed_set ? s.seed : 1;
  o.model = resolve_profile(s).comm_model();
  for (int i = 0; i <= max_log2; ++i) o.sizes.push_back(std::uint64_t{1} << i);
  const auto samples = perf::pingpong_run(o);
  if (auto f = open_out(s, "pingpong.csv")) perf::write_pingpong_csv(*f, samples);
  else perf::write_pingpong_csv(std::cout, samples);
  return 0;
}

int cmd_ta(const Shared& s, double working_set_mb) {
  perf::TaOptions o;
  o.working_set_bytes = static_cast<std::size_t>(working_set_mb * (1 << 20));
  if (s.mode == "modeled") {
    o.mode = perf::TaMode::Synthetic;
    o.synthetic_rate = 1.0 / (resolve_profile(s).ta_us * 1e-6);
  }
  const auto r = perf::measure_ta(o);
  auto f = open_out(s, "ta.csv");
  std::ostream& os = f ? static_cast<std::ostream&>(*f) : std::cout;
  os << "n_per_dir,layout,elements,passes,flops,seconds,flops_per_second\n";
  for (const auto& rec : r.records)
    os << rec.n_per_dir << "," << rec.layout << "," << rec.elements << "," << rec.passes << "," << rec.flops << ","
       << rec.seconds << "," << rec.rate() << "\n";
  std::printf("ta_us %.9g\n", r.t_a * 1e6);
  return 0;
}

int cmd_fit(const Shared& s, const std::string& input, bool unweighted, bool filter, double ta_us, const std::string& name) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot read " + input);
  auto samples = perf::read_pingpong_csv(in);
  if (filter) {
    const auto f = perf::median_filter(samples);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i].seconds = f[i];
  }
  const auto fit = perf::fit_alpha_beta(samples, unweighted ? perf::FitWeighting::Unweighted : perf::FitWeighting::Relative);
  std::printf("alpha_star_us %.9g\nbeta_star_us_per_word %.9g\n", fit.alpha_star * 1e6, fit.beta_star * 1e6);
  if (fit.alpha_clamped || fit.beta_clamped) std::printf("# clamped: alpha=%d beta=%d\n", fit.alpha_clamped, fit.beta_clamped);
  if (ta_us > 0) {
    const perf::MachineProfile p{name, fit.alpha_star * 1e6, fit.beta_star * 1e6, ta_us};
    const auto nd = sim::nondimensionalize(p.comm_model());
    std::printf("alpha %.9g\nbeta %.9g\n", nd.alpha, nd.beta);
    if (auto f = open_out(s, name + ".txt")) perf::write_profile(*f, p);
  }
  return 0;
}

int cmd_report(const Shared& s, const std::string& input, const std::string& kind) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot read " + input);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto r = report::from_json(buf.str());
  if (!kind.empty()) {
    const auto k = report::parse_plot_kind(kind);
    if (auto f = open_out(s, kind + ".svg")) report::emit_svg_plot(*f, r, k);
    else report::emit_svg_plot(std::cout, r, k);
    return 0;
  }
  if (s.out.empty()) {
    report::emit_csv(std::cout, r);
  } else {
    report::write_artifacts(r, s.out);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral element scaling study driver"};
  app.require_subcommand(1);
  Shared shared;

  auto* mesh_cmd = app.add_subcommand("mesh", "build a box mesh and report its size");
  std::vector<int> elements;
  double mem_per_rank = 0;
  mesh_cmd->add_option("--elements", elements, "elements per direction")->expected(3);
  mesh_cmd->add_option("--mem-per-rank", mem_per_rank, "bytes per rank for the minimum rank count");

  auto* part_cmd = app.add_subcommand("partition", "partition the config mesh and print the load histogram");
  int ranks = 1;
  std::string method = "rsb";
  long long count = 0;
  part_cmd->add_option("--ranks,-P", ranks, "number of ranks")->required()->check(CLI::PositiveNumber);
  part_cmd->add_option("--method", method, "partitioner")->check(CLI::IsMember({"rsb", "coordinate", "block"}));
  part_cmd->add_option("--num-elements", count, "balanced split of this many elements instead of the config mesh")
      ->check(CLI::PositiveNumber);

  auto* solve_cmd = app.add_subcommand("solve", "advance the configured flow and write per-step statistics");
  int steps = 0;
  solve_cmd->add_option("--steps", steps, "number of steps (default warmup + window)");

  auto* scale_cmd = app.add_subcommand("scale", "run the scaling sweep and write CSV, JSON and SVG artifacts");

  auto* pp_cmd = app.add_subcommand("pingpong", "ping-pong timings");
  std::string transport = "synthetic";
  int reps = 50, max_log2 = 20;
  double noise = 0.0;
  pp_cmd->add_option("--transport", transport, "synthetic, memory or loopback")
      ->check(CLI::IsMember({"synthetic", "memory", "in-memory", "loopback"}));
  pp_cmd->add_option("--reps", reps, "repetitions per size")->check(CLI::PositiveNumber);
  pp_cmd->add_option("--noise", noise, "relative noise of synthetic timings")->check(CLI::NonNegativeNumber);
  pp_cmd->add_option("--max-log2", max_log2, "largest message is 2^k words")->check(CLI::Range(0, 26));

  auto* ta_cmd = app.add_subcommand("ta", "time per flop from tensor contractions");
  double working_set_mb = 256;
  ta_cmd->add_option("--working-set-mb", working_set_mb, "benchmark working set")->check(CLI::PositiveNumber);

  auto* fit_cmd = app.add_subcommand("fit", "fit alpha* and beta* to ping-pong data");
  std::string input;
  bool unweighted = false, filter = false;
  double ta_us = 0;
  std::string name = "fitted";
  fit_cmd->add_option("--input,input", input, "ping-pong CSV")->required();
  fit_cmd->add_flag("--unweighted", unweighted, "ordinary least squares instead of relative weighting");
  fit_cmd->add_flag("--median-filter", filter, "smooth the timings before fitting");
  fit_cmd->add_option("--ta-us", ta_us, "time per flop; also prints alpha, beta and writes a profile");
  fit_cmd->add_option("--name", name, "profile name");

  auto* report_cmd = app.add_subcommand("report", "re-render artifacts from a report JSON");
  std::string report_input, kind;
  report_cmd->add_option("--input,input", report_input, "report.json")->required();
  report_cmd->add_option("--kind", kind, "single plot: scaling, weak, histogram or convergence");

  for (auto* sub : {mesh_cmd, part_cmd, solve_cmd, scale_cmd, pp_cmd, ta_cmd, fit_cmd, report_cmd}) add_shared(sub, shared);

  if (argc < 2) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*mesh_cmd) return cmd_mesh(shared, elements, mem_per_rank);
    if (*part_cmd) return cmd_partition(shared, ranks, method, count);
    if (*solve_cmd) return cmd_solve(shared, steps);
    if (*scale_cmd) return cmd_scale(shared);
    if (*pp_cmd) return cmd_pingpong(shared, transport, reps, noise, max_log2);
    if (*ta_cmd) return cmd_ta(shared, working_set_mb);
    if (*fit_cmd) return cmd_fit(shared, input, unweighted, filter, ta_us, name);
    if (*report_cmd) return cmd_report(shared, report_input, kind);
  } catch (const report::ExperimentError& e) {
    std::cerr << "error (backend " << e.backend << ", P=" << e.p << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
