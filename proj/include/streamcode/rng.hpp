#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace streamcode::rng {

/// SplitMix64 finalizer; used as a stateless counter-based generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a of a tag string.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Child seed for (tag, index) under a parent seed. Stable across platforms.
constexpr std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) noexcept
{
  return splitmix64(splitmix64(seed ^ fnv1a(tag)) + splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Counter-based draw: the value for (seed, counter) never depends on call order.
constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t counter) noexcept
{
  return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (counter + 1));
}

/// Sequential uniform stream. mt19937_64 output is fixed by the standard and
/// the double conversion is done here, so draws match on every platform.
class Stream
{
public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() noexcept { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace streamcode::rng
