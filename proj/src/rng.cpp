#include "nat2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nat2/errors.hpp"

namespace nat2 {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

double Rng::gamma(double shape) {
  if (!(shape >= 1.0)) {
    throw input_error("Rng::gamma: shape must be >= 1");
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double Rng::chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

double Rng::student_t(double df) {
  if (!(df > 2.0)) {
    throw input_error("Rng::student_t: df must exceed 2");
  }
  return normal() / std::sqrt(chi_squared(df) / df);
}

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
  if (bound == 0) {
    throw input_error("Rng::uniform_int: bound must be positive");
  }
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % bound;
}

void fisher_yates_shuffle(std::vector<int>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(i));
    std::swap(items[i - 1], items[j]);
  }
}

std::vector<int> sample_without_replacement(int population, int m, Rng& rng) {
  if (m < 0 || m > population) {
    throw input_error("sample_without_replacement: m out of range");
  }
  std::vector<int> indices(static_cast<std::size_t>(population));
  for (int i = 0; i < population; ++i) indices[static_cast<std::size_t>(i)] = i;
  fisher_yates_shuffle(indices, rng);
  indices.resize(static_cast<std::size_t>(m));
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace nat2
