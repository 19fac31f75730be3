#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace nat2 {

std::uint64_t splitmix64(std::uint64_t x);

/// Derive an independent stream seed from (seed, stream index). Used for
/// counter-based per-replicate seeding so Monte Carlo results do not depend
/// on worker count or evaluation order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source. The engine is std::mt19937_64 but every
/// distribution is generated here explicitly (Box-Muller, Marsaglia-Tsang,
/// rejection sampling) because the std:: distribution sequences are
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller (second member of each pair is cached).
  double normal();

  /// Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze method.
  double gamma(double shape);

  double chi_squared(double df);

  /// Student t with df > 2 degrees of freedom.
  double student_t(double df);

  /// Uniform integer in [0, bound), bound > 0, unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// In-place Fisher-Yates shuffle with an explicit, documented draw order:
/// for i = n-1 down to 1, swap position i with uniform_int(i + 1).
void fisher_yates_shuffle(std::vector<int>& items, Rng& rng);

/// First m entries of a shuffled {0, ..., population-1}, sorted ascending.
std::vector<int> sample_without_replacement(int population, int m, Rng& rng);

}  // namespace nat2
