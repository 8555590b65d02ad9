#include "semscale/perf/pingpong.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "semscale/error.hpp"

namespace semscale::perf {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PingPongSample summarize(std::uint64_t words, const std::vector<double>& times) {
  return {words, median(times), *std::min_element(times.begin(), times.end()), static_cast<int>(times.size())};
}

// Two threads bounce a buffer through shared memory; each hop copies the payload.
std::vector<double> in_memory_times(std::uint64_t words, int reps) {
  std::vector<double> a(words, 1.0), b(words), back(words);
  std::atomic<int> turn{0};
  std::atomic<bool> stop{false};
  std::thread echo([&] {
    int seen = 0;
    while (true) {
      while (turn.load(std::memory_order_acquire) == seen * 2 && !stop.load(std::memory_order_acquire)) std::this_thread::yield();
      if (stop.load(std::memory_order_acquire)) return;
      std::memcpy(back.data(), b.data(), words * sizeof(double));
      ++seen;
      turn.store(seen * 2, std::memory_order_release);
    }
  });
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    std::memcpy(b.data(), a.data(), words * sizeof(double));
    turn.store(2 * r + 1, std::memory_order_release);
    while (turn.load(std::memory_order_acquire) != 2 * r + 2) std::this_thread::yield();
    std::memcpy(a.data(), back.data(), words * sizeof(double));
    times.push_back(0.5 * std::chrono::duration<double>(Clock::now() - t0).count());
  }
  stop.store(true, std::memory_order_release);
  echo.join();
  return times;
}

void write_all(int fd, const char* p, std::size_t n) {
  while (n > 0) {
    const auto w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("loopback write failed: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

bool read_all(int fd, char* p, std::size_t n) {
  while (n > 0) {
    const auto r = ::read(fd, p, n);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("loopback read failed: ") + std::strerror(errno));
    }
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

std::vector<double> loopback_times(std::uint64_t words, int reps) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw IoError(std::string("socketpair failed: ") + std::strerror(errno));
  const std::size_t bytes = words * sizeof(double);
  std::exception_ptr echo_error;
  std::thread echo([&] {
    std::vector<char> buf(bytes);
    try {
      while (read_all(fds[1], buf.data(), bytes)) write_all(fds[1], buf.data(), bytes);
    } catch (...) {
      echo_error = std::current_exception();
    }
  });
  std::vector<char> out(bytes, 1), in(bytes);
  std::vector<double> times;
  try {
    for (int r = 0; r < reps; ++r) {
      const auto t0 = Clock::now();
      write_all(fds[0], out.data(), bytes);
      if (!read_all(fds[0], in.data(), bytes)) throw IoError("loopback peer closed");
      times.push_back(0.5 * std::chrono::duration<double>(Clock::now() - t0).count());
    }
  } catch (...) {
    ::shutdown(fds[0], SHUT_RDWR);
    echo.join();
    ::close(fds[0]);
    ::close(fds[1]);
    throw;
  }
  ::shutdown(fds[0], SHUT_WR);
  echo.join();
  ::close(fds[0]);
  ::close(fds[1]);
  if (echo_error) std::rethrow_exception(echo_error);
  return times;
}

} // namespace

Transport parse_transport(std::string_view name) {
  if (name == "synthetic") return Transport::Synthetic;
  if (name == "memory" || name == "in-memory") return Transport::InMemory;
  if (name == "loopback") return Transport::Loopback;
  throw InvalidArgument("unknown transport: " + std::string(name));
}

std::vector<std::uint64_t> default_sizes() {
  std::vector<std::uint64_t> s;
  for (int i = 0; i <= 20; ++i) s.push_back(std::uint64_t{1} << i);
  return s;
}

std::vector<PingPongSample> pingpong_run(const PingPongOptions& options) {
  const auto sizes = options.sizes.empty() ? default_sizes() : options.sizes;
  if (options.reps < 1) throw InvalidArgument("pingpong_run: reps must be >= 1");
  if (options.noise < 0.0) throw InvalidArgument("pingpong_run: noise must be >= 0");
  for (auto m : sizes)
    if (m < 1) throw InvalidArgument("pingpong_run: message sizes must be >= 1 word");

  std::vector<PingPongSample> out;
  sim::Rng rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto m : sizes) {
    std::vector<double> times;
    switch (options.transport) {
      case Transport::Synthetic: {
        const double t = sim::message_time(static_cast<double>(m), options.model);
        for (int r = 0; r < options.reps; ++r)
          times.push_back(options.noise > 0.0 ? t * std::max(0.0, 1.0 + options.noise * gauss(rng)) : t);
        break;
      }
      case Transport::InMemory: times = in_memory_times(m, options.reps); break;
      case Transport::Loopback: times = loopback_times(m, options.reps); break;
    }
    out.push_back(summarize(m, times));
  }
  return out;
}

FitResult fit_alpha_beta(std::span<const PingPongSample> samples, FitWeighting weighting) {
  std::set<std::uint64_t> distinct;
  for (const auto& s : samples) distinct.insert(s.words);
  if (distinct.size() < 2) throw DegenerateFitError("fit_alpha_beta: need at least two distinct message sizes");
  for (const auto& s : samples)
    if (!(s.seconds > 0.0)) throw InvalidArgument("fit_alpha_beta: times must be positive");
  auto weight = [&](const PingPongSample& s) {
    return weighting == FitWeighting::Relative ? 1.0 / (s.seconds * s.seconds) : 1.0;
  };
  // Weighted normal equations for [alpha, beta].
  double s0 = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    const double w = weight(s), x = static_cast<double>(s.words);
    s0 += w;
    sx += w * x;
    sxx += w * x * x;
    sy += w * s.seconds;
    sxy += w * x * s.seconds;
  }
  FitResult f;
  f.samples = static_cast<int>(samples.size());
  const double det = s0 * sxx - sx * sx;
  f.alpha_star = (sxx * sy - sx * sxy) / det;
  f.beta_star = (s0 * sxy - sx * sy) / det;
  if (f.beta_star < 0.0) {
    f.beta_star = 0.0;
    f.beta_clamped = true;
    f.alpha_star = sy / s0;
  } else if (f.alpha_star < 0.0) {
    f.alpha_star = 0.0;
    f.alpha_clamped = true;
    f.beta_star = sxy / sxx;
  }
  double r2 = 0.0;
  for (const auto& s : samples) {
    const double r = s.seconds - f.alpha_star - f.beta_star * static_cast<double>(s.words);
    r2 += r * r;
  }
  f.residual_norm = std::sqrt(r2);
  return f;
}

std::vector<double> median_filter(std::span<const PingPongSample> samples) {
  std::vector<double> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i == 0 || i + 1 == samples.size()) {
      out.push_back(samples[i].seconds);
      continue;
    }
    out.push_back(median({samples[i - 1].seconds, samples[i].seconds, samples[i + 1].seconds}));
  }
  return out;
}

void write_pingpong_csv(std::ostream& os, std::span<const PingPongSample> samples) {
  os << "m_words,t_seconds\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%llu,%.9g\n", static_cast<unsigned long long>(s.words), s.seconds);
    os << buf;
  }
}

std::vector<PingPongSample> read_pingpong_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("m_words,t_seconds", 0) != 0)
    throw IoError("ping-pong CSV: missing m_words,t_seconds header");
  std::vector<PingPongSample> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      PingPongSample s;
      s.words = std::stoull(line.substr(0, comma));
      s.seconds = std::stod(line.substr(comma + 1));
      s.min_seconds = s.seconds;
      s.reps = 1;
      if (s.words < 1 || !(s.seconds > 0.0)) throw std::invalid_argument("range");
      out.push_back(s);
    } catch (const std::exception&) {
      throw IoError("ping-pong CSV: bad row at line " + std::to_string(lineno));
    }
  }
  return out;
}

} // namespace semscale::perf
