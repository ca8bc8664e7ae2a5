#pragma once

// Bounded worker pool that delivers results to the sink in index order, so a
// ledger written through it is always an in-order prefix of the full plan no
// matter how workers interleave.

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace persuade::detail {

template <typename Result>
void ordered_parallel_for(
    std::size_t n, int parallelism,
    const std::function<Result(std::size_t)>& work,
    const std::function<void(std::size_t, Result&&)>& sink) {
  if (n == 0) return;
  const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) sink(i, work(i));
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::map<std::size_t, Result> parked;
  std::size_t write_pos = 0;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (first_error) return;
      }
      try {
        Result r = work(i);
        std::lock_guard<std::mutex> lock(mu);
        parked.emplace(i, std::move(r));
        while (!parked.empty() && parked.begin()->first == write_pos) {
          auto node = parked.extract(parked.begin());
          sink(node.key(), std::move(node.mapped()));
          ++write_pos;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace persuade::detail
