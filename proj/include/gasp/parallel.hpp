#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gasp {

/// Runs body(begin, end) over contiguous chunks of [0, count) on up to
/// `workers` threads. Chunks write disjoint outputs, so results do not depend
/// on the worker count. The first exception thrown by a chunk is rethrown.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers < 1 ? 1 : workers, count));
  if (w <= 1) {
    if (count) body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  const std::size_t chunk = (count + w - 1) / w;
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t b = t * chunk, e = std::min(count, b + chunk);
    if (b >= e) break;
    threads.emplace_back([&, t, b, e] {
      try {
        body(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace gasp
