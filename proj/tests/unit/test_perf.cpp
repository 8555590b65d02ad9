#include <cmath>
#include <sstream>

#include "doctest.h"
#include "semscale/error.hpp"
#include "semscale/perf/pingpong.hpp"
#include "semscale/perf/profile.hpp"
#include "semscale/perf/scaling.hpp"
#include "semscale/perf/ta_bench.hpp"
#include "semscale/sem/helmholtz.hpp"

using namespace semscale;
using namespace semscale::perf;

namespace {

const sim::CommModel mira = builtin_profile("mira").comm_model();

ScalingCurve synthetic_curve(std::uint64_t n, std::vector<int> ps, double c, double d) {
  ScalingCurve curve{n, {}};
  for (int p : ps) {
    const double ta = c / p, tc = d * std::log2(static_cast<double>(p));
    curve.samples.push_back({p, ta + tc, ta, tc});
  }
  return curve;
}

} // namespace

TEST_CASE("synthetic ping-pong reproduces the model") {
  PingPongOptions opt;
  opt.model = mira;
  opt.sizes = {1000};
  opt.reps = 3;
  const auto s = pingpong_run(opt);
  REQUIRE(s.size() == 1);
  CHECK(s[0].seconds == doctest::Approx(9e-6).epsilon(1e-12));

  opt.sizes = {1};
  CHECK_THROWS_AS(fit_alpha_beta(pingpong_run(opt)), DegenerateFitError);
  opt.sizes = {0};
  CHECK_THROWS_AS(pingpong_run(opt), InvalidArgument);
  CHECK(default_sizes().size() == 21);
  CHECK(default_sizes().back() == 1u << 20);
  CHECK_THROWS_AS(parse_transport("carrier-pigeon"), InvalidArgument);
}

TEST_CASE("alpha-beta fit") {
  PingPongOptions opt;
  opt.model = {4e-6, 5e-9, 1e-9, {}};
  opt.reps = 1;
  const auto exact = fit_alpha_beta(pingpong_run(opt));
  CHECK(std::abs(exact.alpha_star - 4e-6) / 4e-6 < 1e-12);
  CHECK(std::abs(exact.beta_star - 5e-9) / 5e-9 < 1e-12);
  CHECK(!exact.alpha_clamped);
  const auto plain = fit_alpha_beta(pingpong_run(opt), FitWeighting::Unweighted);
  CHECK(std::abs(plain.alpha_star - 4e-6) / 4e-6 < 1e-12);
  CHECK(std::abs(plain.beta_star - 5e-9) / 5e-9 < 1e-12);

  opt.model = mira;
  opt.noise = 0.02;
  opt.reps = 50;
  opt.seed = 2024;
  opt.sizes.clear();
  for (int i = 0; i < 20; ++i) opt.sizes.push_back(std::uint64_t{1} << i);
  const auto noisy = fit_alpha_beta(pingpong_run(opt));
  CHECK(std::abs(noisy.alpha_star - mira.alpha_star) / mira.alpha_star < 0.05);
  CHECK(std::abs(noisy.beta_star - mira.beta_star) / mira.beta_star < 0.05);

  // Decreasing data clamps beta at zero.
  const std::vector<PingPongSample> down{{1, 2.0, 2.0, 1}, {2, 1.0, 1.0, 1}};
  const auto f = fit_alpha_beta(down);
  CHECK(f.beta_clamped);
  CHECK(f.beta_star == 0.0);
  CHECK(f.alpha_star == doctest::Approx(1.5).epsilon(0.2));
  CHECK(fit_alpha_beta(down, FitWeighting::Unweighted).alpha_star == doctest::Approx(1.5));
}

TEST_CASE("ping-pong csv round trip") {
  const std::vector<PingPongSample> s{{1, 4e-6, 4e-6, 1}, {1024, 9.12e-6, 9e-6, 3}};
  std::stringstream ss;
  write_pingpong_csv(ss, s);
  CHECK(ss.str() == "m_words,t_seconds\n1,4e-06\n1024,9.12e-06\n");
  const auto back = read_pingpong_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].words == 1024);
  CHECK(back[1].seconds == doctest::Approx(9.12e-6));
  std::istringstream bad("m_words,t_seconds\n1,abc\n");
  CHECK_THROWS_AS(read_pingpong_csv(bad), IoError);
  std::istringstream nohdr("1,2\n");
  CHECK_THROWS_AS(read_pingpong_csv(nohdr), IoError);
}

TEST_CASE("real transports") {
  PingPongOptions opt;
  opt.transport = Transport::Loopback;
  opt.reps = 15;
  opt.sizes = {1, 1 << 10, 1 << 14, 1 << 17, 1 << 20};
  const auto s = pingpong_run(opt);
  REQUIRE(s.size() == 5);
  for (const auto& x : s) {
    CHECK(x.seconds > 0.0);
    CHECK(x.min_seconds <= x.seconds);
  }
  const auto filtered = median_filter(s);
  for (std::size_t i = 1; i < filtered.size(); ++i) CHECK(filtered[i] >= filtered[i - 1]);
  const auto fit = fit_alpha_beta(s);
  CHECK(fit.beta_star > 0.0);

  opt.transport = Transport::InMemory;
  opt.sizes = {1, 1 << 16};
  const auto m = pingpong_run(opt);
  CHECK(m[1].seconds > 0.0);
}

TEST_CASE("t_a benchmark") {
  TaOptions syn;
  syn.mode = TaMode::Synthetic;
  syn.synthetic_rate = 1e9;
  const auto r = measure_ta(syn);
  CHECK(r.records.size() == 12);
  CHECK(r.t_a == doctest::Approx(1e-9));

  TaOptions meas;
  meas.working_set_bytes = std::size_t{4} << 20;
  meas.min_seconds = 0.01;
  const auto m = measure_ta(meas);
  REQUIRE(m.records.size() == 12);
  double mean_rate = 0.0;
  for (const auto& rec : m.records) {
    const auto n = static_cast<std::uint64_t>(rec.n_per_dir);
    // n rows of an n x n matrix times n^2 columns, one multiply and one add each.
    CHECK(rec.flops == rec.elements * static_cast<std::uint64_t>(rec.passes) * 2 * n * n * n * n);
    CHECK(rec.flops == rec.elements * static_cast<std::uint64_t>(rec.passes) *
                           sem::flop_count(n, sem::FlopKind::TensorContraction));
    CHECK(rec.seconds >= 0.01);
    CHECK(rec.elements * n * n * n * 16 <= meas.working_set_bytes);
    mean_rate += rec.rate() / 12.0;
  }
  CHECK(m.t_a == doctest::Approx(1.0 / mean_rate));
  CHECK(m.t_a > 1e-13);
  CHECK(m.t_a < 1e-6);
}

TEST_CASE("gridpoints and memory rules") {
  CHECK(gridpoints(36480, 8) == 18677760u);
  CHECK(gridpoints(1264032, 12) == 2184247296u);
  CHECK(gridpoints(1, 2) == 8u);
  CHECK_THROWS_AS(gridpoints(0, 8), InvalidArgument);
  CHECK_THROWS_AS(gridpoints(8, 1), InvalidArgument);
  CHECK(memory_footprint(1) == 4000u);
  CHECK(static_cast<double>(memory_footprint(18677760)) == doctest::Approx(74.7e9).epsilon(1e-3));
  CHECK(min_ranks(2184247296u, 16e9) == 547u);
  CHECK(min_ranks(1, 16e9) == 1u);
  CHECK(min_ranks(2184247296u, 1e6, 1264032) == 1264032u);
  CHECK_THROWS_AS(min_ranks(1, 0.0), InvalidArgument);
}

TEST_CASE("strong scaling limit") {
  ScalingCurve flat{1u << 20, {}};
  for (int p = 1; p <= 1024; p *= 2) flat.samples.push_back({p, 64.0 / p + 1.0, 64.0 / p, 1.0});
  const auto r = strong_scaling_limit(flat);
  REQUIRE(r.reached);
  CHECK(r.crossover_p == doctest::Approx(64.0));
  CHECK(r.n_per_p == doctest::Approx((1u << 20) / 64.0));

  // Dense oracle: step P by one and interpolate between the integers around the crossing.
  const double c = 5000.0, d = 3.0;
  std::vector<int> pows;
  for (int p = 2; p <= 4096; p *= 2) pows.push_back(p);
  const auto curve = synthetic_curve(1u << 24, pows, c, d);
  const auto rep = strong_scaling_limit(curve);
  REQUIRE(rep.reached);
  double dense = 0.0;
  for (int p = 2; p < 4096; ++p) {
    auto g = [&](double q) { return c / q - d * std::log2(q); };
    if (g(p) > 0 && g(p + 1) <= 0) {
      dense = p + g(p) / (g(p) - g(p + 1));
      break;
    }
  }
  const double oracle = static_cast<double>(curve.n) / dense;
  CHECK(std::abs(rep.n_per_p - oracle) / oracle < 0.02);
  CHECK(rep.n_per_p <= rep.n_per_p_lo);
  CHECK(rep.n_per_p >= rep.n_per_p_hi);

  ScalingCurve never{1000, {{1, 2.0, 1.5, 0.5}, {2, 1.2, 1.0, 0.2}}};
  CHECK(!strong_scaling_limit(never).reached);
  ScalingCurve one{1000, {{1, 2.0, 1.5, 0.5}}};
  CHECK_THROWS_AS(strong_scaling_limit(one), InvalidArgument);
  ScalingCurve unordered{1000, {{2, 2.0, 1.5, 0.5}, {1, 2.0, 1.5, 0.5}}};
  CHECK_THROWS_AS(unordered.validate(), InvalidArgument);
}

TEST_CASE("ideal line and weak scaling table") {
  ScalingCurve c{1000, {{16, 120.0, 100.0, 20.0}, {32, 70.0, 50.0, 20.0}, {64, 45.0, 25.0, 20.0}}};
  const auto ideal = ideal_line(c);
  CHECK(ideal[0] == 100.0);
  CHECK(ideal[1] == 50.0);
  CHECK(ideal[2] == 25.0);

  const std::vector<ScalingCurve> single{c};
  CHECK(weak_scaling_table(single).size() == 3);

  ScalingCurve big{8000, {{512, 46.0, 26.0, 20.0}}};
  const std::vector<ScalingCurve> two{c, big};
  const auto table = weak_scaling_table(two);
  CHECK(table.size() == 3);
  bool found = false;
  for (const auto& b : table)
    if (b.entries.size() == 2) {
      found = true;
      CHECK(b.spread() == doctest::Approx(46.0 / 45.0 - 1.0));
    }
  CHECK(found);

  ScalingCurve far{1u << 30, {{1, 1.0, 0.5, 0.5}}};
  const std::vector<ScalingCurve> disjoint{c, far};
  CHECK(weak_scaling_table(disjoint).size() == 4);
}

TEST_CASE("machine profiles") {
  const auto m = builtin_profile("mira");
  CHECK(m.comm_model().alpha_star == doctest::Approx(4e-6));
  CHECK(sim::nondimensionalize(m.comm_model()).alpha == doctest::Approx(3636.36).epsilon(1e-4));
  std::stringstream ss;
  write_profile(ss, builtin_profile("beskow"));
  const auto back = read_profile(ss);
  CHECK(back.name == "beskow");
  CHECK(back.ta_us == doctest::Approx(1.5e-4));
  std::istringstream missing("name = x\nalpha_star_us = 1\n");
  CHECK_THROWS_AS(read_profile(missing), IoError);
  std::istringstream unknown("alpha_star_us = 1\nbeta_star_us_per_word = 1\nta_us = 1\ncolor = red\n");
  CHECK_THROWS_AS(read_profile(unknown), IoError);
  CHECK_THROWS_AS(builtin_profile("summit"), InvalidArgument);
  CHECK_THROWS_AS(load_profile("/nonexistent/profile.txt"), IoError);
}
