#pragma once

#include <cstddef>
#include <vector>

#include "tbq/rng.hpp"

namespace tbq::detail {

/// Fixed work-unit size. Chunk boundaries never depend on the thread count,
/// which is what makes Serial and Parallel output identical.
inline constexpr std::size_t kChunk = 2048;

/// Runs `fill(begin, end, out)` over [0, n) in fixed chunks and concatenates
/// the per-chunk outputs in chunk order. `fill` must not throw.
template <class T, class Fill>
std::vector<T> chunked_collect(std::size_t n, Exec exec, Fill&& fill) {
  const std::ptrdiff_t n_chunks = static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk);
  std::vector<std::vector<T>> parts(static_cast<std::size_t>(n_chunks));
  auto body = [&](std::ptrdiff_t c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = begin + kChunk < n ? begin + kChunk : n;
    fill(begin, end, parts[static_cast<std::size_t>(c)]);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < n_chunks; ++c) body(c);
  } else {
    for (std::ptrdiff_t c = 0; c < n_chunks; ++c) body(c);
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<T> out;
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace tbq::detail
