#ifndef WAVEHIDE_RNG_HPP
#define WAVEHIDE_RNG_HPP

#include <cstdint>
#include <random>

#include "wavehide/tensor.hpp"

namespace wavehide {

/// Stateless seed derivation: mixes a base seed with stream labels so that
/// independent consumers (per-step noise, per-epoch shuffles, per-layer init)
/// never share a stream and resuming at epoch k regenerates exactly the
/// sequence a straight run would have used.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0);

PlanarTensor random_uniform(std::mt19937_64& rng, int channels, int height,
                            int width, double lo = 0.0, double hi = 1.0);
PlanarTensor random_normal(std::mt19937_64& rng, int channels, int height,
                           int width, double mean = 0.0, double stddev = 1.0);

}  // namespace wavehide

#endif
