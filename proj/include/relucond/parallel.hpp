#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace relucond {

// Deterministic work partitioning: the item range is cut into fixed-size
// blocks and each block writes its partial result into a slot indexed by
// block number.  Workers race only over which block they grab next, so the
// combined result is independent of the worker count.  Callers reduce the
// slots sequentially in block order.
constexpr std::size_t kParallelBlock = 1024;

inline std::size_t block_count(std::size_t items, std::size_t block = kParallelBlock) {
  return items == 0 ? 0 : (items - 1) / block + 1;
}

template <class Fn>
void parallel_blocks(std::size_t items, int workers, Fn&& fn,
                     std::size_t block = kParallelBlock) {
  const std::size_t blocks = block_count(items, block);
  if (blocks == 0) return;
  auto run_block = [&](std::size_t b) {
    std::size_t begin = b * block;
    std::size_t end = begin + block < items ? begin + block : items;
    fn(b, begin, end);
  };
  if (workers <= 1 || blocks == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= blocks) return;
      run_block(b);
    }
  };
  std::size_t nthreads = static_cast<std::size_t>(workers);
  if (nthreads > blocks) nthreads = blocks;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

/// Streaming mean/variance cell; combined sequentially over blocks.
struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  void merge(const MeanAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  /// Standard error of the mean (sample variance / count, clamped at 0).
  double se() const {
    if (count < 2) return 0.0;
    double nc = static_cast<double>(count);
    double var = (sum_sq - sum * sum / nc) / (nc - 1.0);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / nc);
  }
};

/// Extreme tracker with deterministic tie-breaking on the smallest index.
struct ExtremeSlot {
  double value = 0.0;
  std::size_t index = 0;
  bool set = false;

  void consider_max(double v, std::size_t i) {
    if (!set || v > value || (v == value && i < index)) {
      value = v;
      index = i;
      set = true;
    }
  }
  void consider_min(double v, std::size_t i) {
    if (!set || v < value || (v == value && i < index)) {
      value = v;
      index = i;
      set = true;
    }
  }
};

}  // namespace relucond
