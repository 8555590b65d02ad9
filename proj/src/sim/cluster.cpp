#include "semscale/sim/cluster.hpp"

#include <cmath>
#include <numeric>

#include "semscale/error.hpp"

namespace semscale::sim {

namespace {

SiteTime& site_entry(std::map<std::string, SiteTime, std::less<>>& sites, std::string_view name) {
  auto it = sites.find(name);
  if (it == sites.end()) it = sites.emplace(std::string(name), SiteTime{}).first;
  return it->second;
}

} // namespace

void Exec::assemble(std::span<const double> local, std::span<double> global, std::string_view /*site*/) {
  if (!numbering_) throw InvalidArgument("Exec::assemble: no numbering attached");
  if (local.size() != numbering_->num_local() || global.size() != static_cast<std::size_t>(numbering_->num_global()))
    throw InvalidArgument("Exec::assemble: size mismatch");
  std::fill(global.begin(), global.end(), 0.0);
  for (std::size_t l = 0; l < local.size(); ++l) global[static_cast<std::size_t>(numbering_->local_to_global[l])] += local[l];
}

void Exec::dot_many(std::span<const double> a, std::span<const std::span<const double>> bs, std::span<double> out,
                    std::string_view /*site*/) {
  for (std::size_t k = 0; k < bs.size(); ++k) {
    if (bs[k].size() != a.size()) throw InvalidArgument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * bs[k][i];
    out[k] = s;
  }
}

double Exec::dot(std::span<const double> a, std::span<const double> b, std::string_view site) {
  const std::span<const double> bs[1] = {b};
  double out = 0.0;
  dot_many(a, bs, std::span<double>(&out, 1), site);
  return out;
}

double Exec::norm(std::span<const double> a, std::string_view site) { return std::sqrt(dot(a, a, site)); }

TimingBreakdown VirtualRanks::timing(std::string window) const {
  TimingBreakdown t = merge_timings(clocks, std::move(window));
  t.sites = site_time;
  return t;
}

Cluster::Cluster(const mesh::GllNumbering& numbering, CommModel model, TimingMode mode)
    : Exec(&numbering), num_(&numbering), model_(model), mode_(mode) {
  if (!(model.t_a > 0.0)) throw InvalidArgument("Cluster: t_a must be positive");
  first_copy_.assign(static_cast<std::size_t>(numbering.num_global()), -1);
  for (std::size_t l = numbering.num_local(); l-- > 0;)
    first_copy_[static_cast<std::size_t>(numbering.local_to_global[l])] = static_cast<int>(l);
}

int Cluster::attach(const mesh::Partition& partition, std::uint64_t seed) {
  VirtualRanks v;
  v.partition = partition;
  v.schedule = build_gather_scatter(*num_, partition);
  const auto np = static_cast<std::size_t>(partition.num_ranks);
  v.clocks.assign(np, {});
  v.log = MessageLog(partition.num_ranks);
  v.rng.seed(seed);
  v.owned_points = v.schedule.owned_counts();
  const auto loads = mesh::rank_loads(partition);
  v.element_share.resize(np);
  v.point_share.resize(np);
  for (std::size_t r = 0; r < np; ++r) {
    v.element_share[r] = static_cast<double>(loads[r]) / partition.num_elements();
    v.point_share[r] = static_cast<double>(v.owned_points[r]) / num_->num_global();
  }
  for (const auto& b : builders_) v.plans.push_back(b(v.partition, v.schedule));
  ranks_.push_back(std::move(v));
  return static_cast<int>(ranks_.size()) - 1;
}

void Cluster::set_distributed(int index) {
  if (index < -1 || index >= num_attached()) throw InvalidArgument("Cluster::set_distributed: no such partition");
  distributed_ = index;
}

void Cluster::compute(VirtualRanks& v, int rank, double flops, double seconds, std::string_view site) {
  const double t = mode_ == TimingMode::Modeled ? flops * model_.t_a : seconds;
  v.clocks[static_cast<std::size_t>(rank)].add_compute(t);
  site_entry(v.site_time, site).t_a += t;
}

void Cluster::comm(VirtualRanks& v, int rank, double seconds, std::string_view site) {
  v.clocks[static_cast<std::size_t>(rank)].add_comm(seconds);
  site_entry(v.site_time, site).t_c += seconds;
}

void Cluster::assemble(std::span<const double> local, std::span<double> global, std::string_view site) {
  if (distributed_ < 0) {
    Exec::assemble(local, global, site);
  } else {
    if (global.size() != static_cast<std::size_t>(num_->num_global())) throw InvalidArgument("assemble: size mismatch");
    const auto& v = ranks_[static_cast<std::size_t>(distributed_)];
    std::vector<double> field(local.begin(), local.end());
    MessageLog scratch_log(v.num_ranks());
    std::vector<RankClock> scratch_clocks(static_cast<std::size_t>(v.num_ranks()));
    dssum(field, *num_, v.schedule, scratch_log, scratch_clocks, model_, nullptr, site);
    for (std::size_t g = 0; g < global.size(); ++g) global[g] = field[static_cast<std::size_t>(first_copy_[g])];
  }
  charge_exchange(site);
}

void Cluster::dot_many(std::span<const double> a, std::span<const std::span<const double>> bs, std::span<double> out,
                       std::string_view site) {
  if (distributed_ < 0 || a.size() != static_cast<std::size_t>(num_->num_global())) {
    Exec::dot_many(a, bs, out, site);
  } else {
    const auto& s = ranks_[static_cast<std::size_t>(distributed_)].schedule;
    for (std::size_t k = 0; k < bs.size(); ++k) {
      if (bs[k].size() != a.size()) throw InvalidArgument("dot: size mismatch");
      double total = 0.0;
      for (int r = 0; r < s.num_ranks; ++r) {
        double partial = 0.0;
        for (int g : s.rank_points[static_cast<std::size_t>(r)])
          if (s.owner[static_cast<std::size_t>(g)] == r) partial += a[static_cast<std::size_t>(g)] * bs[k][static_cast<std::size_t>(g)];
        total += partial;
      }
      out[k] = total;
    }
  }
  charge_points(2.0 * static_cast<double>(bs.size()), 0.0, site);
  charge_allreduce(bs.size(), site);
}

void Cluster::charge_elements(double flops_per_element, double seconds, std::string_view site) {
  if (!active_) return;
  for (auto& v : ranks_) {
    const double ne = v.partition.num_elements();
    for (int r = 0; r < v.num_ranks(); ++r) {
      const double share = v.element_share[static_cast<std::size_t>(r)];
      compute(v, r, flops_per_element * share * ne, seconds * share, site);
    }
  }
}

void Cluster::charge_points(double flops_per_point, double seconds, std::string_view site) {
  if (!active_) return;
  for (auto& v : ranks_)
    for (int r = 0; r < v.num_ranks(); ++r)
      compute(v, r, flops_per_point * v.owned_points[static_cast<std::size_t>(r)],
              seconds * v.point_share[static_cast<std::size_t>(r)], site);
}

void Cluster::charge_exchange(std::string_view site) {
  if (!active_) return;
  for (auto& v : ranks_)
    for (int r = 0; r < v.num_ranks(); ++r)
      for (const auto& rec : v.schedule.exchanges[static_cast<std::size_t>(r)]) {
        v.log.record_send(r, rec.peer, rec.points.size(), site);
        comm(v, r, message_time(static_cast<double>(rec.points.size()), model_, &v.rng), site);
      }
}

void Cluster::charge_allreduce(std::uint64_t words, std::string_view site) {
  if (!active_) return;
  for (auto& v : ranks_) {
    if (v.num_ranks() == 1) continue;
    v.log.record_collective(words, site);
    for (int r = 0; r < v.num_ranks(); ++r)
      comm(v, r, allreduce_time(v.num_ranks(), static_cast<double>(words), model_, &v.rng), site);
  }
}

int Cluster::register_plan(PlanBuilder builder) {
  for (auto& v : ranks_) v.plans.push_back(builder(v.partition, v.schedule));
  builders_.push_back(std::move(builder));
  return static_cast<int>(builders_.size()) - 1;
}

void Cluster::charge_plan(int id, double seconds, std::string_view site) {
  if (!active_ || id < 0) return;
  for (auto& v : ranks_) {
    const auto& plan = v.plans.at(static_cast<std::size_t>(id));
    const double total = std::accumulate(plan.flops.begin(), plan.flops.end(), 0.0);
    for (int r = 0; r < v.num_ranks(); ++r) {
      const double f = r < static_cast<int>(plan.flops.size()) ? plan.flops[static_cast<std::size_t>(r)] : 0.0;
      compute(v, r, f, total > 0.0 ? seconds * f / total : 0.0, site);
    }
    for (const auto& stage : plan.stages)
      for (const auto& m : stage) {
        v.log.record_send(m.src, m.dst, m.words, site);
        comm(v, m.src, message_time(static_cast<double>(m.words), model_, &v.rng), site);
      }
    if (v.num_ranks() > 1)
      for (auto w : plan.allreduce_words) {
        v.log.record_collective(w, site);
        for (int r = 0; r < v.num_ranks(); ++r)
          comm(v, r, allreduce_time(v.num_ranks(), static_cast<double>(w), model_, &v.rng), site);
      }
  }
}

} // namespace semscale::sim
