#include "semscale/perf/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "semscale/error.hpp"

namespace semscale::perf {

std::uint64_t gridpoints(std::uint64_t elements, int n_per_dir) {
  if (elements < 1) throw InvalidArgument("gridpoints: need at least one element");
  if (n_per_dir < 2) throw InvalidArgument("gridpoints: n_per_dir must be >= 2");
  const auto n = static_cast<std::uint64_t>(n_per_dir);
  return elements * n * n * n;
}

void ScalingCurve::validate() const {
  if (samples.empty()) throw InvalidArgument("ScalingCurve: no samples");
  if (n == 0) throw InvalidArgument("ScalingCurve: N must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.p < 1) throw InvalidArgument("ScalingCurve: P must be >= 1");
    if (i > 0 && s.p <= samples[i - 1].p) throw InvalidArgument("ScalingCurve: P must increase strictly");
    if (!(s.t_a > 0.0) || !(s.t_c > 0.0) || !(s.t_total > 0.0)) throw InvalidArgument("ScalingCurve: times must be positive");
  }
}

StrongScalingReport strong_scaling_limit(const ScalingCurve& curve) {
  curve.validate();
  if (curve.samples.size() < 2) throw InvalidArgument("strong_scaling_limit: need at least two samples");
  const double n = static_cast<double>(curve.n);
  StrongScalingReport rep;
  const auto& s = curve.samples;
  auto gap = [](const ScalingSample& x) { return std::log(x.t_a) - std::log(x.t_c); };
  if (gap(s.front()) <= 0.0) return rep;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double d0 = gap(s[i]), d1 = gap(s[i + 1]);
    if (d0 > 0.0 && d1 <= 0.0) {
      const double x0 = std::log(static_cast<double>(s[i].p)), x1 = std::log(static_cast<double>(s[i + 1].p));
      const double x = x0 + d0 / (d0 - d1) * (x1 - x0);
      rep.reached = true;
      rep.crossover_p = std::exp(x);
      rep.n_per_p = n / rep.crossover_p;
      rep.p_lo = s[i].p;
      rep.p_hi = s[i + 1].p;
      rep.n_per_p_lo = n / s[i].p;
      rep.n_per_p_hi = n / s[i + 1].p;
      return rep;
    }
  }
  return rep;
}

std::vector<double> ideal_line(const ScalingCurve& curve) {
  if (curve.samples.empty()) throw InvalidArgument("ideal_line: empty curve");
  const auto& a = curve.samples.front();
  std::vector<double> out;
  for (const auto& s : curve.samples) out.push_back(a.t_a * a.p / s.p);
  return out;
}

double WeakBucket::spread() const {
  if (entries.empty()) return 0.0;
  double lo = entries.front().t_total, hi = lo;
  for (const auto& e : entries) {
    lo = std::min(lo, e.t_total);
    hi = std::max(hi, e.t_total);
  }
  return (hi - lo) / lo;
}

std::vector<WeakBucket> weak_scaling_table(std::span<const ScalingCurve> curves) {
  std::map<int, WeakBucket> buckets;
  for (const auto& c : curves)
    for (const auto& s : c.samples) {
      const int key = static_cast<int>(std::lround(std::log2(static_cast<double>(c.n) / s.p)));
      auto& b = buckets[key];
      b.log2_n_per_p = key;
      b.entries.push_back({c.n, s.p, s.t_total});
    }
  std::vector<WeakBucket> out;
  for (auto& [k, b] : buckets) out.push_back(std::move(b));
  return out;
}

std::uint64_t memory_footprint(std::uint64_t n) { return 500 * 8 * n; }

std::uint64_t min_ranks(std::uint64_t n, double mem_per_rank_bytes, std::uint64_t elements) {
  if (!(mem_per_rank_bytes > 0.0)) throw InvalidArgument("min_ranks: memory per rank must be positive");
  auto p = static_cast<std::uint64_t>(std::ceil(static_cast<double>(memory_footprint(n)) / mem_per_rank_bytes));
  p = std::max<std::uint64_t>(p, 1);
  if (elements > 0) p = std::min(p, elements);
  return p;
}

} // namespace semscale::perf
