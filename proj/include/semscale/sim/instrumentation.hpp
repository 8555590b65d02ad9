#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semscale/sim/comm_model.hpp"

namespace semscale::sim {

/// Per-rank computation and communication clocks. Both only move forward.
struct RankClock {
  double t_a = 0.0;
  double t_c = 0.0;

  /// Throws InvalidArgument on negative increments.
  void add_compute(double seconds);
  void add_comm(double seconds);
};

struct RankCounters {
  std::uint64_t msgs = 0;
  std::uint64_t words_sent = 0;
  std::uint64_t words_recv = 0;
  std::uint64_t collectives = 0;
};

struct SiteCounters {
  std::uint64_t msgs = 0;
  std::uint64_t words = 0;
  std::uint64_t collectives = 0;
  std::uint64_t collective_words = 0;
  /// Point-to-point messages plus collective calls.
  [[nodiscard]] std::uint64_t calls() const { return msgs + collectives; }
};

class MessageLog {
public:
  explicit MessageLog(int num_ranks = 0) : ranks_(static_cast<std::size_t>(num_ranks)) {}

  void record_send(int src, int dst, std::uint64_t words, std::string_view site);
  /// One collective call by every rank (counted once per rank, once per site).
  void record_collective(std::uint64_t words, std::string_view site);

  [[nodiscard]] int num_ranks() const { return static_cast<int>(ranks_.size()); }
  [[nodiscard]] const std::vector<RankCounters>& ranks() const { return ranks_; }
  [[nodiscard]] const std::map<std::string, SiteCounters, std::less<>>& sites() const { return sites_; }
  [[nodiscard]] SiteCounters site(std::string_view name) const;
  [[nodiscard]] RankCounters totals() const;

private:
  std::vector<RankCounters> ranks_;
  std::map<std::string, SiteCounters, std::less<>> sites_;
};

struct SiteTime {
  double t_a = 0.0;  ///< summed over ranks
  double t_c = 0.0;
};

struct TimingBreakdown {
  std::vector<double> t_a;
  std::vector<double> t_c;
  std::map<std::string, SiteTime, std::less<>> sites;
  std::string window;

  [[nodiscard]] double mean_t_a() const;
  [[nodiscard]] double mean_t_c() const;
  [[nodiscard]] double mean_total() const { return mean_t_a() + mean_t_c(); }
};

/// Modeled compute charge: flops * t_a. Throws InvalidArgument for flops < 0.
void record_compute(double flops, RankClock& clock, const CommModel& model);

/// Per-rank vectors from the clocks; the means are what plots use.
TimingBreakdown merge_timings(std::span<const RankClock> clocks, std::string window = {});

/// Columns: rank, T_a_seconds, T_c_seconds, msgs, words_sent, words_recv.
void write_timing_csv(std::ostream& os, const TimingBreakdown& timing, const MessageLog& log);

} // namespace semscale::sim
