#include "semscale/sim/gather_scatter.hpp"

#include <algorithm>
#include <map>

#include "semscale/error.hpp"

namespace semscale::sim {

std::size_t GatherScatterSchedule::total_messages() const {
  std::size_t n = 0;
  for (const auto& r : exchanges) n += r.size();
  return n;
}

std::size_t GatherScatterSchedule::total_words() const {
  std::size_t n = 0;
  for (const auto& r : exchanges)
    for (const auto& rec : r) n += rec.points.size();
  return n;
}

std::vector<int> GatherScatterSchedule::owned_counts() const {
  std::vector<int> c(static_cast<std::size_t>(num_ranks), 0);
  for (int r : owner) ++c[static_cast<std::size_t>(r)];
  return c;
}

void GatherScatterSchedule::validate() const {
  for (int r = 0; r < num_ranks; ++r)
    for (const auto& rec : exchanges[static_cast<std::size_t>(r)]) {
      const auto& back = exchanges[static_cast<std::size_t>(rec.peer)];
      const auto it = std::find_if(back.begin(), back.end(), [r](const ExchangeRecord& x) { return x.peer == r; });
      if (it == back.end() || it->points != rec.points)
        throw InvalidArgument("GatherScatterSchedule: asymmetric exchange records");
    }
}

GatherScatterSchedule build_gather_scatter(const mesh::HexMesh& mesh, const mesh::Partition& partition,
                                           int n_per_dir) {
  if (partition.num_elements() != mesh.num_elements())
    throw InvalidArgument("build_gather_scatter: partition does not match mesh");
  return build_gather_scatter(mesh::build_numbering(mesh, n_per_dir), partition);
}

GatherScatterSchedule build_gather_scatter(const mesh::GllNumbering& numbering, const mesh::Partition& partition) {
  const std::size_t ppe = numbering.points_per_element();
  if (ppe == 0 || numbering.num_local() != ppe * static_cast<std::size_t>(partition.num_elements()))
    throw InvalidArgument("build_gather_scatter: partition does not match numbering");
  partition.validate();

  GatherScatterSchedule s;
  s.num_ranks = partition.num_ranks;
  s.num_global = numbering.num_global();
  s.rank_elements = partition.elements_by_rank();
  const auto np = static_cast<std::size_t>(s.num_ranks);
  const auto ng = static_cast<std::size_t>(s.num_global);
  s.rank_points.resize(np);
  s.local_slot.resize(np);
  s.exchanges.resize(np);

  // Ranks touching each point, ascending (ranks are visited in order).
  std::vector<std::vector<int>> sharers(ng);
  for (std::size_t r = 0; r < np; ++r) {
    auto& pts = s.rank_points[r];
    for (int e : s.rank_elements[r])
      for (std::size_t i = 0; i < ppe; ++i) pts.push_back(numbering.local_to_global[static_cast<std::size_t>(e) * ppe + i]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (int g : pts) sharers[static_cast<std::size_t>(g)].push_back(static_cast<int>(r));

    auto& slot = s.local_slot[r];
    slot.reserve(s.rank_elements[r].size() * ppe);
    for (int e : s.rank_elements[r])
      for (std::size_t i = 0; i < ppe; ++i) {
        const int g = numbering.local_to_global[static_cast<std::size_t>(e) * ppe + i];
        slot.push_back(static_cast<int>(std::lower_bound(pts.begin(), pts.end(), g) - pts.begin()));
      }
  }

  s.rank_multiplicity.resize(ng);
  s.owner.resize(ng);
  std::vector<std::map<int, std::vector<int>>> pairs(np);
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& sh = sharers[g];
    s.rank_multiplicity[g] = static_cast<int>(sh.size());
    s.owner[g] = sh.empty() ? 0 : sh.front();
    for (int a : sh)
      for (int b : sh)
        if (a != b) pairs[static_cast<std::size_t>(a)][b].push_back(static_cast<int>(g));
  }
  for (std::size_t r = 0; r < np; ++r)
    for (auto& [peer, pts] : pairs[r]) s.exchanges[r].push_back({peer, std::move(pts)});
  return s;
}

void dssum(std::span<double> field, const mesh::GllNumbering& numbering, const GatherScatterSchedule& schedule,
           MessageLog& log, std::span<RankClock> clocks, const CommModel& model, Rng* rng, std::string_view site) {
  const std::size_t ppe = numbering.points_per_element();
  if (field.size() != numbering.num_local()) throw InvalidArgument("dssum: field size does not match numbering");
  if (schedule.num_global != numbering.num_global() || clocks.size() != static_cast<std::size_t>(schedule.num_ranks) ||
      log.num_ranks() != schedule.num_ranks)
    throw InvalidArgument("dssum: schedule, clocks and log must agree");

  const auto np = static_cast<std::size_t>(schedule.num_ranks);
  std::vector<std::vector<double>> partial(np);
  for (std::size_t r = 0; r < np; ++r) {
    auto& p = partial[r];
    p.assign(schedule.rank_points[r].size(), 0.0);
    const auto& slot = schedule.local_slot[r];
    std::size_t l = 0;
    for (int e : schedule.rank_elements[r])
      for (std::size_t i = 0; i < ppe; ++i, ++l) p[static_cast<std::size_t>(slot[l])] += field[static_cast<std::size_t>(e) * ppe + i];
  }

  // inbox[r][k] holds what peer exchanges[r][k].peer sent to r.
  std::vector<std::vector<std::vector<double>>> inbox(np);
  for (std::size_t r = 0; r < np; ++r) inbox[r].resize(schedule.exchanges[r].size());
  for (std::size_t r = 0; r < np; ++r) {
    const auto& pts = schedule.rank_points[r];
    for (const auto& rec : schedule.exchanges[r]) {
      std::vector<double> msg(rec.points.size());
      for (std::size_t k = 0; k < rec.points.size(); ++k)
        msg[k] = partial[r][static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), rec.points[k]) - pts.begin())];
      const auto& peer_recs = schedule.exchanges[static_cast<std::size_t>(rec.peer)];
      const auto it = std::find_if(peer_recs.begin(), peer_recs.end(),
                                   [&](const ExchangeRecord& x) { return x.peer == static_cast<int>(r); });
      inbox[static_cast<std::size_t>(rec.peer)][static_cast<std::size_t>(it - peer_recs.begin())] = std::move(msg);
      log.record_send(static_cast<int>(r), rec.peer, rec.points.size(), site);
      clocks[r].add_comm(message_time(static_cast<double>(rec.points.size()), model, rng));
    }
  }

  for (std::size_t r = 0; r < np; ++r) {
    const auto& pts = schedule.rank_points[r];
    const auto& recs = schedule.exchanges[r];
    std::vector<double> total(pts.size(), 0.0);
    // Add sources in ascending rank order; own partial goes between lower and higher peers.
    std::size_t k = 0;
    auto add_peer = [&](std::size_t idx) {
      const auto& rec = recs[idx];
      for (std::size_t q = 0; q < rec.points.size(); ++q)
        total[static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), rec.points[q]) - pts.begin())] +=
            inbox[r][idx][q];
    };
    for (; k < recs.size() && recs[k].peer < static_cast<int>(r); ++k) add_peer(k);
    for (std::size_t i = 0; i < pts.size(); ++i) total[i] += partial[r][i];
    for (; k < recs.size(); ++k) add_peer(k);

    const auto& slot = schedule.local_slot[r];
    std::size_t l = 0;
    for (int e : schedule.rank_elements[r])
      for (std::size_t i = 0; i < ppe; ++i, ++l) field[static_cast<std::size_t>(e) * ppe + i] = total[static_cast<std::size_t>(slot[l])];
  }
}

} // namespace semscale::sim
