#include "wavehide/rng.hpp"

namespace wavehide {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t a,
                            std::uint64_t b, std::uint64_t c) {
  return std::mt19937_64(mix_seed(base, a, b, c));
}

PlanarTensor random_uniform(std::mt19937_64& rng, int channels, int height,
                            int width, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  PlanarTensor t(channels, height, width);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  return t;
}

PlanarTensor random_normal(std::mt19937_64& rng, int channels, int height,
                           int width, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  PlanarTensor t(channels, height, width);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  return t;
}

}  // namespace wavehide
