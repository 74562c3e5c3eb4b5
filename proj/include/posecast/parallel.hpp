#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace posecast::par {

// Applies the POSECAST_THREADS cap (if set) to the OpenMP runtime.
// Call once from main(); a no-op in non-OpenMP builds.
void apply_thread_cap();

int max_threads();

// Cells per reduction chunk. Fixed so that chunk partial sums, and therefore
// every reduction built on them, are bitwise identical for any thread count.
inline constexpr std::size_t kChunk = 8192;

inline std::size_t chunk_count(std::size_t n) {
  return n == 0 ? 0 : (n - 1) / kChunk + 1;
}

// Deterministic sum of term(i) for i in [0, n): chunk partials may be
// computed on any thread, but each partial is a serial left-to-right sum and
// partials are combined in chunk order.
template <class Term>
double chunked_sum(std::size_t n, Term&& term) {
  const std::size_t chunks = chunk_count(n);
  if (chunks <= 1) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += term(i);
    return acc;
  }
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(begin + kChunk, n);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace posecast::par
