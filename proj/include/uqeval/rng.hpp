#pragma once

#include <array>
#include <cstdint>

namespace uqeval {

/// Philox4x32-10 block function (Salmon et al., Random123).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Counter-based stream addressed by (seed, purpose, a, b). Every value is a
/// pure function of its address and position, so any worker can regenerate
/// any stream without shared state.
///
/// Counter layout: word0 = block index, word1 = b, word2 = a, word3 = purpose.
/// Key = (low, high) 32-bit halves of the seed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t purpose, std::uint32_t a = 0, std::uint32_t b = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        purpose_(purpose), a_(a), b_(b) {}

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; both variates of a pair are used.
  double normal() noexcept;
  /// Index drawn with probabilities proportional to `weights[0..n)`.
  std::size_t categorical(const double* weights, std::size_t n) noexcept;

 private:
  PhiloxKey key_;
  std::uint32_t purpose_;
  std::uint32_t a_;
  std::uint32_t b_;
  std::uint32_t block_ = 0;
  PhiloxCounter buffer_{};
  unsigned used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Purposes used by the synthetic generator; part of the reproducibility contract.
namespace rng_purpose {
inline constexpr std::uint32_t kBaseField = 1;
inline constexpr std::uint32_t kInstanceNoise = 2;
inline constexpr std::uint32_t kOodBias = 3;
inline constexpr std::uint32_t kAnnotation = 4;
inline constexpr std::uint32_t kAleatoricSample = 5;
inline constexpr std::uint32_t kSubsample = 6;
}  // namespace rng_purpose

}  // namespace uqeval
