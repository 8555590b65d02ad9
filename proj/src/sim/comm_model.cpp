#include "semscale/sim/comm_model.hpp"

#include "semscale/error.hpp"

namespace semscale::sim {

Nondimensional nondimensionalize(const CommModel& model) {
  if (!(model.t_a > 0.0)) throw InvalidArgument("nondimensionalize: t_a must be positive");
  return {model.alpha_star / model.t_a, model.beta_star / model.t_a};
}

double message_time(double m_words, const CommModel& model, Rng* rng) {
  if (m_words < 0.0) throw InvalidArgument("message_time: negative message length");
  double t = model.alpha_star + model.beta_star * m_words;
  if (model.noise.enabled && rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(*rng) < model.noise.probability) t *= model.noise.multiplier;
  }
  return t;
}

int allreduce_rounds(int num_ranks) {
  if (num_ranks < 1) throw InvalidArgument("allreduce: need at least one rank");
  int rounds = 0;
  while ((1LL << rounds) < num_ranks) ++rounds;
  return rounds;
}

double allreduce_time(int num_ranks, double m_words, const CommModel& model, Rng* rng) {
  const int rounds = allreduce_rounds(num_ranks);
  double t = 0.0;
  for (int i = 0; i < rounds; ++i) t += message_time(m_words, model, rng);
  return t;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

} // namespace semscale::sim
