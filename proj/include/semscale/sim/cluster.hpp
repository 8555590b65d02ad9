#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semscale/mesh/numbering.hpp"
#include "semscale/mesh/partition.hpp"
#include "semscale/sim/comm_model.hpp"
#include "semscale/sim/gather_scatter.hpp"
#include "semscale/sim/instrumentation.hpp"

namespace semscale::sim {

enum class TimingMode { Modeled, Measured };

struct PlanMessage {
  int src = 0;
  int dst = 0;
  std::uint64_t words = 0;
};

/// Per-rank cost of one application of a distributed kernel whose data
/// layout depends on the partition (coarse solvers).
struct CommPlan {
  std::vector<double> flops;
  std::vector<std::vector<PlanMessage>> stages;
  std::vector<std::uint64_t> allreduce_words;
};

using PlanBuilder = std::function<CommPlan(const mesh::Partition&, const GatherScatterSchedule&)>;

/// Where solver work runs and who pays for it. The base class computes
/// serially and charges nothing.
class Exec {
public:
  explicit Exec(const mesh::GllNumbering* numbering = nullptr) : numbering_(numbering) {}
  virtual ~Exec() = default;

  [[nodiscard]] const mesh::GllNumbering* numbering() const { return numbering_; }

  /// global = sum of element-local contributions (element-major, E n^3 values).
  /// Charges one exchange at `site`. Requires a numbering.
  virtual void assemble(std::span<const double> local, std::span<double> global, std::string_view site);

  /// out[k] = a . bs[k] with one reduction of bs.size() words.
  virtual void dot_many(std::span<const double> a, std::span<const std::span<const double>> bs, std::span<double> out,
                        std::string_view site);
  double dot(std::span<const double> a, std::span<const double> b, std::string_view site = "dot");
  double norm(std::span<const double> a, std::string_view site = "dot");

  virtual void charge_elements(double /*flops_per_element*/, double /*seconds*/, std::string_view /*site*/) {}
  /// Work proportional to the global points a rank owns.
  virtual void charge_points(double /*flops_per_point*/, double /*seconds*/, std::string_view /*site*/) {}
  /// One direct-stiffness exchange with the current partition's neighbours.
  virtual void charge_exchange(std::string_view /*site*/) {}
  virtual void charge_allreduce(std::uint64_t /*words*/, std::string_view /*site*/) {}
  /// Returns an id for charge_plan, or -1 if this context does not charge.
  virtual int register_plan(PlanBuilder /*builder*/) { return -1; }
  virtual void charge_plan(int /*id*/, double /*seconds*/, std::string_view /*site*/) {}

private:
  const mesh::GllNumbering* numbering_;
};

/// Clocks, counters and exchange data of one partition.
struct VirtualRanks {
  mesh::Partition partition;
  GatherScatterSchedule schedule;
  std::vector<RankClock> clocks;
  MessageLog log;
  std::map<std::string, SiteTime, std::less<>> site_time;
  Rng rng;
  std::vector<double> element_share;
  std::vector<double> point_share;
  std::vector<int> owned_points;
  std::vector<CommPlan> plans;

  [[nodiscard]] int num_ranks() const { return partition.num_ranks; }
  [[nodiscard]] TimingBreakdown timing(std::string window = {}) const;
};

/// Virtual-rank execution context. Numerics run once (serially, or through the
/// genuine per-rank exchange of one chosen partition); every attached partition
/// is charged the cost it would incur, so one run yields a whole P sweep.
/// Charges are only recorded while the context is active.
class Cluster : public Exec {
public:
  Cluster(const mesh::GllNumbering& numbering, CommModel model, TimingMode mode = TimingMode::Modeled);

  /// Returns the index of the new partition. Throws InvalidArgument on mismatch.
  int attach(const mesh::Partition& partition, std::uint64_t seed = 0);
  /// Route assembly and reductions through partition `index`'s ranks (-1: serial order).
  void set_distributed(int index);
  void set_active(bool on) { active_ = on; }
  [[nodiscard]] bool active() const { return active_; }
  [[nodiscard]] int num_attached() const { return static_cast<int>(ranks_.size()); }
  [[nodiscard]] const VirtualRanks& ranks(int index) const { return ranks_.at(static_cast<std::size_t>(index)); }
  [[nodiscard]] const CommModel& model() const { return model_; }
  [[nodiscard]] TimingMode mode() const { return mode_; }

  void assemble(std::span<const double> local, std::span<double> global, std::string_view site) override;
  void dot_many(std::span<const double> a, std::span<const std::span<const double>> bs, std::span<double> out,
                std::string_view site) override;
  void charge_elements(double flops_per_element, double seconds, std::string_view site) override;
  void charge_points(double flops_per_point, double seconds, std::string_view site) override;
  void charge_exchange(std::string_view site) override;
  void charge_allreduce(std::uint64_t words, std::string_view site) override;
  int register_plan(PlanBuilder builder) override;
  void charge_plan(int id, double seconds, std::string_view site) override;

private:
  void compute(VirtualRanks& v, int rank, double flops, double seconds, std::string_view site);
  void comm(VirtualRanks& v, int rank, double seconds, std::string_view site);

  const mesh::GllNumbering* num_;
  CommModel model_;
  TimingMode mode_;
  bool active_ = true;
  int distributed_ = -1;
  std::vector<VirtualRanks> ranks_;
  std::vector<PlanBuilder> builders_;
  std::vector<int> first_copy_;
};

} // namespace semscale::sim
