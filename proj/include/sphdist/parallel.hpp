#pragma once

#include <cstddef>
#include <functional>

namespace sphdist {

/// Degree of parallelism for bulk sampling. Results never depend on it:
/// work is split into fixed-size chunks, each with its own RNG stream.
struct Exec {
  unsigned threads = 0;  // 0 = hardware concurrency

  unsigned resolved() const noexcept;
};

/// Number of items per chunk for all chunked Monte Carlo loops.
inline constexpr std::size_t kChunkSize = 8192;

inline std::size_t chunk_count(std::size_t items) noexcept {
  return (items + kChunkSize - 1) / kChunkSize;
}

/// Runs body(task) for task in [0, tasks). Exceptions are rethrown on the
/// calling thread; when several tasks throw, the lowest task index wins so
/// the reported error is independent of scheduling.
void parallel_for(std::size_t tasks, const Exec& exec,
                  const std::function<void(std::size_t)>& body);

}  // namespace sphdist
