#ifndef DURATELESS_PARALLEL_HPP
#define DURATELESS_PARALLEL_HPP

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace durateless {

/** Resolve a worker count: explicit request wins, then the
 *  DURATELESS_THREADS environment variable, then hardware concurrency.
 */
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DURATELESS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/** Run fn(i) for i in [0, n) on up to `threads` workers. Each index is
 *  processed exactly once; callers keep determinism by writing results to
 *  slot i only. The first exception thrown by any worker is rethrown.
 */
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        // strided assignment: worker w handles i = w, w+workers, ...
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace durateless

#endif
