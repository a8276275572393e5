// Deterministic splittable random streams. Every random draw in the project
// comes from a named child stream of the master seed, so results do not
// depend on thread count or evaluation order.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace specshare {

namespace detail {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// splitmix64 generator with hash-derived substreams. Child streams are
// derived from the stream identity (not its position), so consuming a parent
// never perturbs its children.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : id_(seed), state_(detail::mix64(seed)) {}

  // Independent stream addressed by a label and up to three indices.
  [[nodiscard]] Rng child(std::string_view label, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t s = id_;
    s = detail::mix64(s ^ detail::fnv1a(label));
    s = detail::mix64(s ^ a);
    s = detail::mix64(s ^ b);
    s = detail::mix64(s ^ c);
    return Rng(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in {0, ..., n-1}. Modulo bias is < n/2^64, irrelevant at
  // the small n used here (counters, placements).
  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  // Standard normal via Box-Muller; pairs are consumed eagerly.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so log() is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::uint64_t id() const { return id_; }

 private:
  std::uint64_t id_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace specshare
