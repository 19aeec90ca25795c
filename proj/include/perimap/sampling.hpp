#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "perimap/mapping.hpp"

namespace perimap {

enum class SampleStrategy { Grid, UniformRandom, Hybrid };

std::string_view to_string(SampleStrategy s);

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::size_t n_points = 64;
  SampleStrategy strategy = SampleStrategy::Grid;

  bool operator==(const SamplerConfig&) const = default;
};

/// Name recorded in every report so sampled runs can be reproduced.
inline constexpr std::string_view kGeneratorName = "mt19937_64/splitmix64";

/// Seedable, splittable source: a 64-bit Mersenne twister whose state is
/// seeded through splitmix64, with child streams derived from (seed, stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng split(std::uint64_t stream) const { return Rng(seed_, stream_ * 0x9E3779B97F4A7C15ull + stream + 1); }

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits, identical across platforms.
  double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform on {0, ..., n-1}.
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// GRID takes the canonical lattice, strided evenly down to n_points when the
/// lattice is larger. UNIFORM_RANDOM draws n_points from K. HYBRID takes
/// ceil(n/2) lattice points followed by floor(n/2) random ones.
std::vector<Point> sample_points(const DomainSpec& K, const SamplerConfig& cfg);

}  // namespace perimap
