#include "sphdist/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sphdist {

unsigned Exec::resolved() const noexcept {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t tasks, const Exec& exec,
                  const std::function<void(std::size_t)>& body) {
  if (tasks == 0) return;
  const std::size_t workers = std::min<std::size_t>(exec.resolved(), tasks);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_task = tasks;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      try {
        body(task);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (task < error_task) {
          error_task = task;
          error = std::current_exception();
        }
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace sphdist
