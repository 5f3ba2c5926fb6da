#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace thinkbench {

// Portable generators with fixed, documented algorithms. Dataset bytes depend
// on these exact sequences, so any change here is a format break and must
// bump kStreamDerivationVersion.
inline constexpr int kStreamDerivationVersion = 1;

// Vigna's SplitMix64. Used for seeding and stream derivation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

// xoshiro256** 1.0, state filled from four SplitMix64 outputs.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);

  std::uint64_t next();
  // Uniform integer in [lo, hi] by rejection sampling on the raw 64-bit output.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t fnv1a64(std::string_view bytes);

// Seed of the independent stream for one (task, list size, fold):
//   key    = fnv1a64("<task>|<list_size or 0>|<fold>")
//   stream = SplitMix64(run_seed ^ key).next()
std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view task,
                                 int list_size, int fold);

// Fresh seed from the OS entropy source.
std::uint64_t entropy_seed();

}  // namespace thinkbench
