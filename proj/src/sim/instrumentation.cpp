#include "semscale/sim/instrumentation.hpp"

#include <cstdio>
#include <numeric>
#include <ostream>

#include "semscale/error.hpp"

namespace semscale::sim {

void RankClock::add_compute(double seconds) {
  if (seconds < 0.0) throw InvalidArgument("RankClock: negative compute time");
  t_a += seconds;
}

void RankClock::add_comm(double seconds) {
  if (seconds < 0.0) throw InvalidArgument("RankClock: negative communication time");
  t_c += seconds;
}

namespace {

SiteCounters& site_entry(std::map<std::string, SiteCounters, std::less<>>& sites, std::string_view name) {
  auto it = sites.find(name);
  if (it == sites.end()) it = sites.emplace(std::string(name), SiteCounters{}).first;
  return it->second;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

void MessageLog::record_send(int src, int dst, std::uint64_t words, std::string_view site) {
  if (src < 0 || dst < 0 || src >= num_ranks() || dst >= num_ranks())
    throw InvalidArgument("MessageLog: rank out of range");
  auto& s = ranks_[static_cast<std::size_t>(src)];
  ++s.msgs;
  s.words_sent += words;
  ranks_[static_cast<std::size_t>(dst)].words_recv += words;
  auto& e = site_entry(sites_, site);
  ++e.msgs;
  e.words += words;
}

void MessageLog::record_collective(std::uint64_t words, std::string_view site) {
  for (auto& r : ranks_) ++r.collectives;
  auto& e = site_entry(sites_, site);
  e.collectives += ranks_.size();
  e.collective_words += words * ranks_.size();
}

SiteCounters MessageLog::site(std::string_view name) const {
  const auto it = sites_.find(name);
  return it == sites_.end() ? SiteCounters{} : it->second;
}

RankCounters MessageLog::totals() const {
  RankCounters t;
  for (const auto& r : ranks_) {
    t.msgs += r.msgs;
    t.words_sent += r.words_sent;
    t.words_recv += r.words_recv;
    t.collectives += r.collectives;
  }
  return t;
}

double TimingBreakdown::mean_t_a() const { return mean(t_a); }
double TimingBreakdown::mean_t_c() const { return mean(t_c); }

void record_compute(double flops, RankClock& clock, const CommModel& model) {
  if (flops < 0.0) throw InvalidArgument("record_compute: negative flop count");
  clock.add_compute(flops * model.t_a);
}

TimingBreakdown merge_timings(std::span<const RankClock> clocks, std::string window) {
  TimingBreakdown t;
  t.window = std::move(window);
  t.t_a.reserve(clocks.size());
  t.t_c.reserve(clocks.size());
  for (const auto& c : clocks) {
    t.t_a.push_back(c.t_a);
    t.t_c.push_back(c.t_c);
  }
  return t;
}

void write_timing_csv(std::ostream& os, const TimingBreakdown& timing, const MessageLog& log) {
  os << "rank,T_a_seconds,T_c_seconds,msgs,words_sent,words_recv\n";
  char buf[160];
  for (std::size_t r = 0; r < timing.t_a.size(); ++r) {
    const RankCounters c = r < log.ranks().size() ? log.ranks()[r] : RankCounters{};
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%llu,%llu,%llu\n", r, timing.t_a[r], timing.t_c[r],
                  static_cast<unsigned long long>(c.msgs), static_cast<unsigned long long>(c.words_sent),
                  static_cast<unsigned long long>(c.words_recv));
    os << buf;
  }
}

} // namespace semscale::sim
