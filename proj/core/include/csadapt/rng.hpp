#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>

namespace csadapt {

/// Seed for every random stream in the library.
struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(RngSeed, RngSeed) = default;
};

/// One step of the splitmix64 sequence applied to `x` (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives a child seed from an ordered list of words.
///
/// h starts at 0x6a09e667f3bcc909 and absorbs each word w as
/// h = splitmix64(h ^ w). The result is stable across platforms and is the
/// only way seeds are derived inside the library (trial seeds, matrix seeds).
RngSeed derive_seed(std::initializer_list<std::uint64_t> words) noexcept;

/// xoshiro256** generator with a Box-Muller normal transform.
///
/// State word i (0..3) is splitmix64(seed + i·0x9e3779b97f4a7c15), i.e. the
/// first four outputs of a splitmix64 stream started at the seed.
/// Uniform doubles take the top 53 bits. Normal variates use the basic
/// (trigonometric) Box-Muller transform; both outputs of a pair are used,
/// the sine branch being cached for the next call.
class Rng {
 public:
  explicit Rng(RngSeed seed) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept;

  /// Standard normal variate.
  double normal() noexcept;

  /// Uniform integer on [0, bound), bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t s_[4];
  std::optional<double> cached_normal_;
};

}  // namespace csadapt
