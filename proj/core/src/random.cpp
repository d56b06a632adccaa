#include "igb/random.hpp"

#include <algorithm>

namespace igb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) {
  return splitmix64(splitmix64(master) ^ splitmix64(a + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

double Rng::uniform_open() {
  // 53 random mantissa bits, shifted by half a unit: values lie in (0,1).
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t k) {
  const auto idx = static_cast<std::size_t>(uniform_open() * static_cast<double>(k));
  return std::min(idx, k - 1);
}

double Rng::normal() { return normal_(engine_); }

}  // namespace igb
