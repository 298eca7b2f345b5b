// Order-independent parallel reduction over Monte Carlo trials.
#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace dynbit {

// Runs fn(trial_index) for every trial in [0, trials) across the given number
// of worker threads and sums the returned 64-bit counts. The reduction is an
// integer sum, so the result does not depend on the thread count.
template <class Fn>
std::int64_t parallel_count(std::int64_t trials, int threads, Fn&& fn) {
  if (threads <= 1) {
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < trials; ++i) total += fn(i);
    return total;
  }
  std::vector<std::int64_t> partial(static_cast<std::size_t>(threads), 0);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      std::int64_t local = 0;
      for (std::int64_t i = w; i < trials; i += threads) local += fn(i);
      partial[static_cast<std::size_t>(w)] = local;
    });
  }
  for (auto& t : pool) t.join();
  std::int64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

// Same pattern for integer histograms (e.g. per-depth counts); buckets are
// summed elementwise.
template <class Fn>
std::vector<std::int64_t> parallel_histogram(std::int64_t trials, int threads,
                                             std::size_t buckets, Fn&& fn) {
  std::vector<std::vector<std::int64_t>> partial(
      static_cast<std::size_t>(std::max(1, threads)),
      std::vector<std::int64_t>(buckets, 0));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < trials; ++i) fn(i, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t i = w; i < trials; i += threads)
          fn(i, partial[static_cast<std::size_t>(w)]);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<std::int64_t> total(buckets, 0);
  for (const auto& part : partial)
    for (std::size_t b = 0; b < buckets; ++b) total[b] += part[b];
  return total;
}

}  // namespace dynbit
