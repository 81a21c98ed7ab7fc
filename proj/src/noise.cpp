#include "dpip/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace dpip {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a;
  std::uint64_t x = splitmix64(state);
  state ^= b + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
  return splitmix64(state);
}

NoiseSource::NoiseSource(std::uint64_t seed) : seed_(seed) {
  // mt19937_64 seeded through splitmix64 so that nearby seeds do not
  // produce correlated low-order state.
  std::uint64_t state = seed;
  engine_.seed(splitmix64(state));
}

std::uint64_t NoiseSource::next_u64() { return engine_(); }

double NoiseSource::uniform01() {
  // 53 random bits, offset by half an ulp: never exactly 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseSource::uniform_open_closed() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t NoiseSource::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

bool NoiseSource::bernoulli(double p) { return uniform01() < p; }

double NoiseSource::laplace(double scale) {
  const double u = uniform01() - 0.5;
  const double sign = u < 0 ? -1.0 : 1.0;
  return -scale * sign * std::log(1.0 - 2.0 * std::fabs(u));
}

NoiseSource NoiseSource::split(std::uint64_t stream_index) const {
  return NoiseSource(mix_seed(seed_, stream_index));
}

}  // namespace dpip
