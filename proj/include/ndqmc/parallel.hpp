#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ndqmc {

/// Thread cap from NEGDEP_QMC_THREADS, or 1 when unset or unparsable.
inline std::size_t default_threads() {
  if (const char* env = std::getenv("NEGDEP_QMC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return 1;
}

/// Runs body(i, acc) for i in [0, count) over contiguous chunks, one
/// accumulator per chunk, and merges the accumulators in chunk order.
/// With an associative, commutative merge (integer counts) the result does
/// not depend on the thread count.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::size_t count, std::size_t threads, Acc init, Body body, Merge merge) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    Acc acc = init;
    for (std::size_t i = 0; i < count; ++i) body(i, acc);
    return acc;
  }
  std::vector<Acc> partial(threads, init);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t lo = count * w / threads;
      const std::size_t hi = count * (w + 1) / threads;
      workers.emplace_back([&, lo, hi, w] {
        for (std::size_t i = lo; i < hi; ++i) body(i, partial[w]);
      });
    }
  }
  Acc acc = init;
  for (auto& p : partial) merge(acc, p);
  return acc;
}

/// Runs body(i) for i in [0, count); body must only write to slot i of any
/// shared output.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body body) {
  struct Unit {};
  parallel_reduce(
      count, threads, Unit{}, [&](std::size_t i, Unit&) { body(i); }, [](Unit&, const Unit&) {});
}

}  // namespace ndqmc
