#include "semscale/report/experiment.hpp"

#include "semscale/error.hpp"
#include "semscale/mesh/hex_mesh.hpp"
#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sim/cluster.hpp"

namespace semscale::report {

namespace {

CellCounters collect(const sim::VirtualRanks& v, const std::string& coarse_site) {
  CellCounters c;
  c.p = v.num_ranks();
  for (const auto& [name, s] : v.log.sites()) {
    c.msgs += s.calls();
    c.words += s.words + s.collective_words;
    if (name == coarse_site) {
      c.coarse_msgs += s.calls();
      c.coarse_words += s.words + s.collective_words;
    }
  }
  c.histogram = mesh::partition_histogram(v.partition);
  for (const auto& [name, t] : v.site_time)
    c.sites[name] = {t.t_a / c.p, t.t_c / c.p};
  return c;
}

} // namespace

ScalingReport run_scaling_experiment(const ExperimentConfig& config, const perf::MachineProfile& profile) {
  config.validate();
  const auto m = mesh::build_box_mesh(config.elements[0], config.elements[1], config.elements[2], config.box,
                                      config.periodic);
  const auto num = mesh::build_numbering(m, config.n_per_dir);
  const auto basis = sem::make_reference_basis(config.n_per_dir);
  const auto flow = time::make_flow_case(config.flow, config.reynolds);
  auto model = profile.comm_model();
  model.noise = config.noise;

  ScalingReport rep;
  rep.config_hash = config_hash(config);
  rep.config_text = config_text(config);
  rep.profile = profile.name;
  rep.window = "steps " + std::to_string(config.warmup + 1) + "-" + std::to_string(config.warmup + config.window);
  rep.n = perf::gridpoints(static_cast<std::uint64_t>(m.num_elements()), config.n_per_dir);
  rep.num_elements = m.num_elements();

  for (std::size_t bi = 0; bi < config.backends.size(); ++bi) {
    const auto backend = config.backends[bi];
    const std::string bname(solvers::to_string(backend));
    sim::Cluster cluster(num, model, config.mode);
    for (int p : config.ranks) {
      try {
        cluster.attach(mesh::recursive_spectral_bisection(m, p),
                       sim::mix_seed(config.seed, bi, static_cast<std::uint64_t>(p)));
      } catch (const std::exception& e) {
        throw ExperimentError("backend " + bname + ", P=" + std::to_string(p) + ": " + e.what(), bname, p);
      }
    }
    time::SolverSettings settings;
    settings.schwarz.coarse = backend;
    settings.schwarz.local = config.local;
    settings.projection = config.projection;
    settings.pressure_tolerance = config.pressure_tolerance;
    settings.velocity_tolerance = config.velocity_tolerance;
    settings.restart = config.restart;
    settings.max_iterations = config.max_iterations;

    BackendResult br;
    br.backend = bname;
    br.config_hash = rep.config_hash;
    try {
      time::FlowSolver solver(m, num, basis, cluster, time::TimeScheme::make(config.k, config.dt, config.reynolds),
                              settings, flow.forcing);
      auto state = solver.initial_state(flow.initial);
      for (int step = 1; step <= config.warmup + config.window; ++step) {
        cluster.set_active(step > config.warmup);
        const double before = cluster.ranks(0).timing().mean_total();
        auto r = solver.advance(state);
        r.model_seconds = cluster.ranks(0).timing().mean_total() - before;
        br.steps.push_back(r);
      }
    } catch (const std::exception& e) {
      throw ExperimentError("backend " + bname + ", all P: " + e.what(), bname, 0);
    }

    br.curve.n = rep.n;
    const std::string coarse_site = backend == solvers::CoarseBackend::None ? "" : "coarse_" + bname;
    for (int i = 0; i < cluster.num_attached(); ++i) {
      const auto& v = cluster.ranks(i);
      const auto t = v.timing(rep.window);
      br.curve.samples.push_back({v.num_ranks(), t.mean_total(), t.mean_t_a(), t.mean_t_c()});
      br.cells.push_back(collect(v, coarse_site));
    }
    br.ideal = perf::ideal_line(br.curve);
    // P = 1 has no communication; the crossover search uses the samples that do.
    perf::ScalingCurve comm{rep.n, {}};
    for (const auto& s : br.curve.samples)
      if (s.t_a > 0.0 && s.t_c > 0.0) comm.samples.push_back(s);
    if (comm.samples.size() >= 2) br.strong = perf::strong_scaling_limit(comm);
    br.weak = perf::weak_scaling_table(std::span<const perf::ScalingCurve>(&br.curve, 1));
    rep.backends.push_back(std::move(br));
  }
  return rep;
}

} // namespace semscale::report
