#include "semscale/perf/ta_bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "semscale/error.hpp"
#include "semscale/sem/basis.hpp"
#include "semscale/sem/helmholtz.hpp"
#include "semscale/sem/tensor.hpp"

namespace semscale::perf {

namespace {

using Clock = std::chrono::steady_clock;

double checksum_sink = 0.0;

} // namespace

TaReport measure_ta(const TaOptions& options) {
  if (options.orders.empty()) throw InvalidArgument("measure_ta: no orders");
  if (options.mode == TaMode::Synthetic && !(options.synthetic_rate > 0.0))
    throw InvalidArgument("measure_ta: synthetic rate must be positive");
  TaReport rep;
  for (int n : options.orders) {
    if (n < 2) throw InvalidArgument("measure_ta: orders must be >= 2");
    const auto un = static_cast<std::size_t>(n);
    const std::size_t ppe = un * un * un;
    const auto per_test = sem::flop_count(un, sem::FlopKind::TensorContraction);
    const std::uint64_t elements =
        std::max<std::uint64_t>(1, options.working_set_bytes / (2 * ppe * sizeof(double)));
    std::vector<double> in, out;
    std::vector<double> d;
    if (options.mode == TaMode::Measured) {
      d = sem::make_reference_basis(n).diff_matrix;
      in.resize(elements * ppe);
      out.resize(elements * ppe);
      std::mt19937 gen(static_cast<unsigned>(n));
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (auto& v : in) v = dist(gen);
    }
    for (int layout = 0; layout < 3; ++layout) {
      TaRecord r;
      r.n_per_dir = n;
      r.layout = layout;
      r.elements = elements;
      if (options.mode == TaMode::Synthetic) {
        r.passes = 1;
        r.flops = elements * per_test;
        r.seconds = static_cast<double>(r.flops) / options.synthetic_rate;
        rep.records.push_back(r);
        continue;
      }
      int passes = 1;
      while (true) {
        std::uint64_t flops = 0;
        const auto t0 = Clock::now();
        for (int p = 0; p < passes; ++p)
          for (std::uint64_t e = 0; e < elements; ++e) {
            sem::contract_cube(d, un, layout, std::span<const double>(in).subspan(e * ppe, ppe),
                               std::span<double>(out).subspan(e * ppe, ppe));
            flops += per_test;
          }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        checksum_sink += out[0];
        if (secs >= options.min_seconds || passes >= (1 << 20)) {
          r.passes = passes;
          r.flops = flops;
          r.seconds = secs;
          break;
        }
        passes *= 2;
      }
      rep.records.push_back(r);
    }
  }
  double mean_rate = 0.0;
  for (const auto& r : rep.records) mean_rate += r.rate();
  mean_rate /= static_cast<double>(rep.records.size());
  rep.t_a = 1.0 / mean_rate;
  return rep;
}

} // namespace semscale::perf
