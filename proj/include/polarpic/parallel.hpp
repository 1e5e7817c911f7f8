#pragma once

// Deterministic chunked loops. Work is split into fixed-size chunks whose
// boundaries depend only on the problem size, never on the thread count, so
// reductions merged in chunk order are bitwise reproducible.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace polarpic {

inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Calls body(chunk, begin, end) for every chunk, possibly concurrently.
/// An exception thrown by any chunk is rethrown on the calling thread once
/// the loop finishes (the lowest-numbered failing chunk wins).
template <class Body>
void for_each_chunk(std::size_t n, Body&& body) {
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
  std::exception_ptr error;
  std::int64_t error_chunk = chunks;
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    try {
      body(static_cast<std::size_t>(c), begin, end);
    } catch (...) {
#pragma omp critical(polarpic_chunk_error)
      if (c < error_chunk) {
        error_chunk = c;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Parallel map over indices [0, n).
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  for_each_chunk(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) body(m);
  });
}

/// Sums F per-particle quantities into bins. bin_of(m) returns the bin of
/// particle m (values >= bins are skipped); values_of(m) returns a
/// std::array<double, F>. Partial sums are formed per chunk and merged in
/// chunk order, so the result does not depend on the thread count.
template <std::size_t F, class BinOf, class ValuesOf>
std::vector<std::array<double, F>> binned_sum(std::size_t n, std::size_t bins, BinOf&& bin_of,
                                              ValuesOf&& values_of) {
  const std::size_t chunks = chunk_count(n);
  std::vector<std::array<double, F>> partial(chunks * bins, std::array<double, F>{});
  for_each_chunk(n, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::array<double, F>* local = partial.data() + c * bins;
    for (std::size_t m = begin; m < end; ++m) {
      const std::size_t b = bin_of(m);
      if (b >= bins) continue;
      const std::array<double, F> v = values_of(m);
      for (std::size_t f = 0; f < F; ++f) local[b][f] += v[f];
    }
  });
  std::vector<std::array<double, F>> total(bins, std::array<double, F>{});
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t b = 0; b < bins; ++b) {
      for (std::size_t f = 0; f < F; ++f) total[b][f] += partial[c * bins + b][f];
    }
  }
  return total;
}

/// Sets the OpenMP team size used by subsequent kernels; 0 keeps the
/// runtime default.
inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

inline int thread_count() { return omp_get_max_threads(); }

}  // namespace polarpic
