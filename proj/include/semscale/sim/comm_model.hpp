#pragma once

#include <cstdint>
#include <random>

namespace semscale::sim {

/// Occasional latency spikes: each message is slowed by `multiplier` with `probability`.
struct NoiseSpec {
  bool enabled = false;
  double probability = 1e-3;
  double multiplier = 10.0;
};

/// Linear communication model t_c(m) = alpha* + beta* m, all in seconds; a word is 64 bits.
struct CommModel {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  double t_a = 1e-9;
  NoiseSpec noise{};
};

struct Nondimensional {
  double alpha = 0.0;
  double beta = 0.0;
};

using Rng = std::mt19937_64;

/// alpha = alpha*/t_a, beta = beta*/t_a. Throws InvalidArgument when t_a <= 0.
Nondimensional nondimensionalize(const CommModel& model);

/// alpha* + beta* m, times the spike factor when noise is enabled and `rng` fires.
/// Throws InvalidArgument for m < 0.
double message_time(double m_words, const CommModel& model, Rng* rng = nullptr);

/// ceil(log2 P).
int allreduce_rounds(int num_ranks);

/// ceil(log2 P) * message_time(m). Throws InvalidArgument for P < 1.
double allreduce_time(int num_ranks, double m_words, const CommModel& model, Rng* rng = nullptr);

/// Mixes a base seed with two coordinates (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

} // namespace semscale::sim
