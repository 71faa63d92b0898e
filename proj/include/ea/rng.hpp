#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ea {

/// Keyed stream derivation. Every sample in an experiment is drawn from an
/// engine seeded by mixing the master seed with a tuple of counters
/// (replica, time index, role, ...), so any single sample can be regenerated
/// without replaying the ones before it.
class StreamSeeder {
 public:
  explicit StreamSeeder(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master() const { return master_; }

  std::uint64_t key(std::initializer_list<std::uint64_t> counters) const {
    std::uint64_t h = mix(master_ ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t c : counters) h = mix(h ^ mix(c + 0x9e3779b97f4a7c15ULL));
    return h;
  }

  std::mt19937_64 engine(std::initializer_list<std::uint64_t> counters) const {
    return std::mt19937_64(key(counters));
  }

 private:
  // SplitMix64 finaliser.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t master_;
};

/// Role tags used as the last counter of a stream key.
enum class Stream : std::uint64_t {
  outer = 1,
  inner_a = 2,
  inner_b = 3,
  flow = 4,
  initial = 5,
  barrier = 6,
  exterior = 7,
  path = 8,
  gauge = 9,
  subset = 10,
};

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace ea
