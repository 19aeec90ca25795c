#include "perimap/sampling.hpp"

#include <array>
#include <numeric>

namespace perimap {

std::string_view to_string(SampleStrategy s) {
  switch (s) {
    case SampleStrategy::Grid: return "GRID";
    case SampleStrategy::UniformRandom: return "UNIFORM_RANDOM";
    case SampleStrategy::Hybrid: return "HYBRID";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t state = seed ^ (stream * 0xD1B54A32D192ED03ull);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); i += 2) {
    const auto v = splitmix64(state);
    words[i] = std::uint32_t(v);
    words[i + 1] = std::uint32_t(v >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::size_t Rng::index(std::size_t n) {
  // rejection sampling keeps the draw unbiased and platform independent
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return std::size_t(v % n);
}

namespace {

std::vector<Point> strided(const std::vector<Point>& all, std::size_t n) {
  if (n >= all.size()) return all;
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(all[i * all.size() / n]);
  return out;
}

std::vector<Point> random_points(const DomainSpec& K, std::size_t n, Rng rng) {
  std::vector<Point> out;
  out.reserve(n);
  if (const auto* f = std::get_if<FiniteSet>(&K.shape)) {
    if (n > f->points.size())
      throw Error(ErrorKind::InvalidSpec, "requested more samples than the finite domain holds");
    std::vector<std::size_t> order(f->points.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(order[i], order[i + rng.index(order.size() - i)]);
      out.push_back(f->points[order[i]]);
    }
  } else if (const auto* b = std::get_if<Box>(&K.shape)) {
    for (std::size_t k = 0; k < n; ++k) {
      Point p(b->lower.size());
      for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.uniform(b->lower[i], b->upper[i]);
      out.push_back(std::move(p));
    }
  } else {
    const auto& r = std::get<RayUnion>(K.shape);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t pick = rng.index(r.base.size() + 1);
      if (pick < r.base.size())
        out.push_back(r.base[pick]);
      else
        out.push_back(rng.uniform(r.alpha_min, r.alpha_max) * r.direction);
    }
  }
  return out;
}

}  // namespace

std::vector<Point> sample_points(const DomainSpec& K, const SamplerConfig& cfg) {
  if (cfg.n_points == 0) throw Error(ErrorKind::InvalidSpec, "sampler n_points must be positive");
  Rng rng(cfg.seed);
  switch (cfg.strategy) {
    case SampleStrategy::Grid: {
      auto all = lattice(K);
      if (K.is_finite_set() && cfg.n_points > all.size())
        throw Error(ErrorKind::InvalidSpec, "requested " + std::to_string(cfg.n_points) +
                                                " grid points from a finite domain of " + std::to_string(all.size()));
      return strided(all, cfg.n_points);
    }
    case SampleStrategy::UniformRandom:
      return random_points(K, cfg.n_points, rng.split(1));
    case SampleStrategy::Hybrid: {
      auto out = strided(lattice(K), (cfg.n_points + 1) / 2);
      std::size_t remaining = cfg.n_points - out.size();
      if (K.is_finite_set()) remaining = std::min(remaining, std::get<FiniteSet>(K.shape).points.size());
      auto extra = random_points(K, remaining, rng.split(2));
      out.insert(out.end(), extra.begin(), extra.end());
      return out;
    }
  }
  return {};
}

}  // namespace perimap
