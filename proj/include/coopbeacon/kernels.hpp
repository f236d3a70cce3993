#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <omp.h>

#include "coopbeacon/numerics.hpp"

namespace coopbeacon {

/// Running first and second moments of one quantity.
class MomentAccumulator {
 public:
  void add(double x) noexcept {
    sum_.add(x);
    sum_sq_.add(x * x);
    ++count_;
  }

  void merge(const MomentAccumulator& other) noexcept {
    sum_.merge(other.sum_);
    sum_sq_.merge(other.sum_sq_);
    count_ += other.count_;
  }

  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  [[nodiscard]] double mean() const noexcept {
    return count_ == 0 ? 0.0 : sum_.value() / static_cast<double>(count_);
  }

  /// Sample standard deviation over sqrt(n).
  [[nodiscard]] double standard_error() const noexcept {
    if (count_ < 2) {
      return 0.0;
    }
    const double n = static_cast<double>(count_);
    const double m = sum_.value() / n;
    const double var = std::max(0.0, (sum_sq_.value() - n * m * m) / (n - 1.0));
    return std::sqrt(var / n);
  }

 private:
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
  std::uint64_t count_ = 0;
};

template <std::size_t K>
using MomentBlock = std::array<MomentAccumulator, K>;

/// Trials per reduction block. Fixed so the merge tree never depends on the
/// thread count.
inline constexpr std::uint64_t kBlockTrials = 8192;

/// Reference implementation: one pass, one accumulator per output.
template <std::size_t K, class Fn>
MomentBlock<K> accumulate_serial(std::uint64_t n, Fn&& fn) {
  MomentBlock<K> acc{};
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::array<double, K> v = fn(i);
    for (std::size_t k = 0; k < K; ++k) {
      acc[k].add(v[k]);
    }
  }
  return acc;
}

/// Block-parallel version. Blocks of kBlockTrials are summed independently and
/// merged in block order, so the result is identical for any `threads`.
/// `fn` must be safe to call concurrently for different trial indices.
template <std::size_t K, class Fn>
MomentBlock<K> accumulate_parallel(std::uint64_t n, Fn&& fn, int threads = 0) {
  const std::uint64_t blocks = (n + kBlockTrials - 1) / kBlockTrials;
  std::vector<MomentBlock<K>> partial(blocks);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const auto nb = static_cast<std::int64_t>(blocks);

#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBlockTrials;
    const std::uint64_t hi = std::min(n, lo + kBlockTrials);
    MomentBlock<K>& acc = partial[static_cast<std::size_t>(b)];
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::array<double, K> v = fn(i);
      for (std::size_t k = 0; k < K; ++k) {
        acc[k].add(v[k]);
      }
    }
  }

  MomentBlock<K> total{};
  for (const MomentBlock<K>& blk : partial) {
    for (std::size_t k = 0; k < K; ++k) {
      total[k].merge(blk[k]);
    }
  }
  return total;
}

/// Evaluates fn(i) for every trial into slot i of the result.
template <std::size_t K, class Fn>
std::vector<std::array<double, K>> evaluate_parallel(std::uint64_t n, Fn&& fn, int threads = 0) {
  std::vector<std::array<double, K>> out(static_cast<std::size_t>(n));
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  const auto ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::int64_t i = 0; i < ni; ++i) {
    out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
  }
  return out;
}

}  // namespace coopbeacon
