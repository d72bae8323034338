#include "meps/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace meps {

std::size_t thread_budget() {
  std::size_t budget = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MEPS_THREADS")) {
    try {
      const long requested = std::stol(env);
      if (requested >= 1) budget = std::min<std::size_t>(budget, std::size_t(requested));
    } catch (...) {
      // unparsable values fall back to hardware concurrency
    }
  }
  return budget;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_budget(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  // Each worker keeps its first failure; the one with the lowest index is rethrown.
  std::vector<std::exception_ptr> failure(workers);
  std::vector<std::size_t> failed_at(workers, count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            fn(i);
          } catch (...) {
            failure[w] = std::current_exception();
            failed_at[w] = i;
            return;
          }
        }
      });
    }
  }
  const auto first = std::min_element(failed_at.begin(), failed_at.end());
  if (*first < count) std::rethrow_exception(failure[std::size_t(first - failed_at.begin())]);
}

}  // namespace meps
