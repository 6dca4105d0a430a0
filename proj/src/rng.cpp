#include "tbq/rng.hpp"

namespace tbq {

Substream::Substream(std::uint64_t seed, StreamTag tag, std::uint64_t index, std::uint64_t salt)
    : key_(mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ index) ^ mix64(salt + 1)) {}

}  // namespace tbq
