#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace matid {

/// Smallest index in [0, count) for which `hit(i)` is true, scanning chunks
/// on `threads` workers. The answer does not depend on the schedule: every
/// index below the returned one has been checked.
template <class Hit>
std::optional<std::uint64_t> parallel_first_hit(std::uint64_t count, unsigned threads, Hit&& hit,
                                                std::uint64_t chunk = 4096) {
  threads = std::max(1u, threads);
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> best{count};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      for (;;) {
        std::uint64_t c = next_chunk.fetch_add(1);
        std::uint64_t lo = c * chunk;
        if (lo >= count || lo >= best.load()) return;
        std::uint64_t hi = std::min(count, lo + chunk);
        for (std::uint64_t i = lo; i < hi && i < best.load(); ++i) {
          if (hit(i)) {
            std::uint64_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {
            }
            break;
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      best.store(0);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  if (best.load() >= count) return std::nullopt;
  return best.load();
}

/// SplitMix64 finalizer; used to derive independent per-index seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace matid
