#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace tracekit::parallel {

/// Worker count used by the heavy loops. Results never depend on it: work is
/// cut into blocks whose size is fixed by the caller and partial results are
/// folded in block order.
void set_threads(unsigned count) noexcept;
unsigned threads() noexcept;

template <class Fn>
void run_blocks(std::size_t block_count, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(threads(), block_count);
  if (workers <= 1) {
    for (std::size_t b = 0; b < block_count; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, block_count] {
      for (std::size_t b = w; b < block_count; b += workers) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

/// Reduces fn(begin, end) over [0, count) cut into blocks of `block` items.
/// Partials are combined left to right, so the result is bit-stable.
template <class T, class BlockFn, class Combine>
T ordered_block_reduce(std::size_t count, std::size_t block, T init, BlockFn&& fn,
                       Combine&& combine) {
  if (count == 0) return init;
  block = std::max<std::size_t>(block, 1);
  const std::size_t blocks = (count + block - 1) / block;
  std::vector<T> partial(blocks, init);
  run_blocks(blocks, [&](std::size_t b) {
    const std::size_t begin = b * block;
    const std::size_t end = std::min(count, begin + block);
    partial[b] = fn(begin, end);
  });
  T acc = std::move(init);
  for (auto& p : partial) acc = combine(std::move(acc), p);
  return acc;
}

template <class BlockFn>
double ordered_block_sum(std::size_t count, std::size_t block, BlockFn&& fn) {
  return ordered_block_reduce(count, block, 0.0, std::forward<BlockFn>(fn),
                              [](double a, double b) { return a + b; });
}

/// Calls fn(i) for every i; fn must only write to slot i of its outputs.
template <class Fn>
void for_each_index(std::size_t count, Fn&& fn, std::size_t block = 256) {
  if (count == 0) return;
  const std::size_t blocks = (count + block - 1) / block;
  run_blocks(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(count, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) fn(i);
  });
}

}  // namespace tracekit::parallel
