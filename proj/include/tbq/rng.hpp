#pragma once

#include <cstdint>
#include <limits>

namespace tbq {

/// How a data-parallel kernel runs. Both policies produce identical output;
/// Serial is the reference the parallel path is tested against.
enum class Exec { Serial, Parallel };

/// Domain-separation tags for the substreams drawn from one master seed.
enum class StreamTag : std::uint64_t {
  Trajectory = 0x7472616aULL,
  Interferometer = 0x6d696368ULL,
  Filter = 0x66696c74ULL,
  Detector = 0x68627464ULL,
};

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output i is a pure function of (key, i), and
/// the key is a pure function of (seed, tag, index, salt). Independent of
/// how work is split across threads. Satisfies UniformRandomBitGenerator.
class Substream {
 public:
  using result_type = std::uint64_t;

  Substream(std::uint64_t seed, StreamTag tag, std::uint64_t index, std::uint64_t salt = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ ^ mix64(++counter_)); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tbq
