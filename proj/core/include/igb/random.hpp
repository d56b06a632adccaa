#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace igb {

/// Mixes a master seed with stream indices into an independent 64-bit seed.
/// Used to give every tree (and every flow step) its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform_open();
  /// Uniform on {0, ..., k-1}.
  std::size_t uniform_index(std::size_t k);
  double normal();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace igb
