#pragma once

#include <algorithm>
#include <barrier>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sigcore {

// 0 means "default": SIGCORE_THREADS when set to a positive integer,
// otherwise std::thread::hardware_concurrency().
unsigned resolve_threads(unsigned requested);

// [begin, end) share of `n` items for worker `w` of `workers`. Lower worker
// ids receive the first (and, on uneven splits, the larger) chunks.
struct Chunk {
  std::size_t begin;
  std::size_t end;
};

inline Chunk static_chunk(std::size_t n, std::size_t workers, std::size_t w) {
  const std::size_t base = n / workers;
  const std::size_t extra = n % workers;
  const std::size_t begin = w * base + std::min(w, extra);
  return {begin, begin + base + (w < extra ? 1 : 0)};
}

// Runs fn(begin, end) over a static partition of [0, n). Each item is owned by
// exactly one call, so results never depend on the worker count as long as fn
// writes only to per-item outputs.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  auto guarded = [&](std::size_t w) {
    const Chunk c = static_chunk(n, workers, w);
    try {
      fn(c.begin, c.end);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(guarded, w);
    guarded(0);
  }
  if (error) std::rethrow_exception(error);
}

// A fixed team of workers stepping through a sequence of phases in lockstep.
//
// Phase s has length(s) independent items. Before a phase, worker 0 alone runs
// serial(s); then every worker processes its static_chunk of the phase and the
// team synchronizes. serial(s) therefore runs concurrently with the other
// workers' share of phase s, and may only touch state they do not read.
// Anti-diagonal sweeps map one diagonal to one phase. serial and body must not
// throw.
class WavefrontTeam {
public:
  explicit WavefrontTeam(unsigned threads) : threads_(std::max(1u, threads)) {}

  unsigned size() const noexcept { return threads_; }

  template <class Length, class Serial, class Body>
  void sweep(std::size_t phases, Length&& length, Serial&& serial, Body&& body) const {
    if (threads_ == 1) {
      for (std::size_t s = 0; s < phases; ++s) {
        serial(s);
        body(s, std::size_t{0}, static_cast<std::size_t>(length(s)));
      }
      return;
    }
    std::barrier sync(static_cast<std::ptrdiff_t>(threads_));
    auto worker = [&](std::size_t w) {
      for (std::size_t s = 0; s < phases; ++s) {
        if (w == 0) serial(s);
        const Chunk c = static_chunk(length(s), threads_, w);
        if (c.begin < c.end) body(s, c.begin, c.end);
        sync.arrive_and_wait();
      }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads_ - 1);
    for (std::size_t w = 1; w < threads_; ++w) pool.emplace_back(worker, w);
    worker(0);
  }

private:
  unsigned threads_;
};

} // namespace sigcore
