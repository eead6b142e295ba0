#include "chaoslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chaoslab {

namespace {
std::atomic<unsigned> g_threads{1};
thread_local bool t_inside_worker = false;
}  // namespace

void set_num_threads(unsigned threads) { g_threads.store(std::max(1u, threads)); }

unsigned num_threads() { return g_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(num_threads(), count));
  if (workers <= 1 || t_inside_worker) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        t_inside_worker = true;
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) break;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
          }
        }
        t_inside_worker = false;
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace chaoslab
