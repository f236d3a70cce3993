#pragma once

#include <array>
#include <cstdint>

namespace coopbeacon {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter apply(Counter ctr, Key key) noexcept;
};

/// Random stream addressed by (seed, trial, stream id).
///
/// Every draw is a pure function of its address, so trials can be evaluated
/// in any order or on any thread and still see identical numbers. A stream
/// handle must not be shared between threads; `fork` makes an independent
/// sibling for another link or noise source of the same trial.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream = 0) noexcept
      : seed_(seed), trial_(trial), stream_(stream) {}

  [[nodiscard]] CounterRng fork(std::uint32_t stream) const noexcept {
    return CounterRng(seed_, trial_, stream);
  }

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1]; never returns 0 so log(u) is finite.
  double uniform_open0() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

  [[nodiscard]] std::uint64_t trial() const noexcept { return trial_; }
  [[nodiscard]] std::uint32_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t trial_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace coopbeacon
