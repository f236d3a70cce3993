#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "coopbeacon/random.hpp"

namespace coopbeacon {

/// Path-loss/shadowing description of one link. Either a direct power scale
/// lambda, or shadowing * distance^-exponent.
class LinkParams {
 public:
  static LinkParams direct(double lambda);
  static LinkParams pathloss(double shadowing, double distance, double exponent);

  /// Resolved mean power gain lambda > 0.
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] bool is_direct() const noexcept { return !distance_.has_value(); }

 private:
  explicit LinkParams(double lambda) : lambda_(lambda) {}
  double lambda_;
  std::optional<double> shadowing_;
  std::optional<double> distance_;
  std::optional<double> exponent_;
};

/// The three links of a single secondary pair: primary->Tx, primary->Rx, Tx<->Rx.
struct LinkTriple {
  LinkParams pt = LinkParams::direct(1.0);
  LinkParams pr = LinkParams::direct(1.0);
  LinkParams tr = LinkParams::direct(1.0);

  static LinkTriple direct(double pt, double pr, double tr) {
    return {LinkParams::direct(pt), LinkParams::direct(pr), LinkParams::direct(tr)};
  }
};

/// One joint realization of link power gains |gamma|^2. The Tx<->Rx link is
/// reciprocal, so a single gain serves both directions.
struct ChannelSet {
  double g_pt = 0.0;
  double g_pr = 0.0;
  double g_tr = 0.0;
};

struct MetricTriple {
  double t_p = 0.0;
  double t_t = 0.0;
  double t_r = 0.0;
};

/// Estimated metrics t~_i = t_i + w_i, w_i ~ N(0, sigma^2). May be negative.
struct NoisyMetricTriple {
  double tilde_t_p = 0.0;
  double tilde_t_t = 0.0;
  double tilde_t_r = 0.0;
  double sigma = 0.0;
};

/// Importance-sampling proposal for exponential gains: a defensive mixture
/// (1 - tilt_weight) * Exp(lambda) + tilt_weight * Exp(min(lambda, tilt_mean)).
/// tilt_weight = 0 is plain sampling with unit likelihood ratio.
struct GainProposal {
  double tilt_mean = 0.0;
  double tilt_weight = 0.0;

  static GainProposal plain() { return {}; }
  /// Mass shifted toward gains of order 1/rho, where deep fades dominate error events.
  static GainProposal deep_fade(double rho) { return {1.0 / rho, 0.5}; }
};

struct WeightedGain {
  double gain = 0.0;
  double weight = 1.0;  ///< likelihood ratio p(gain) / q(gain)
};

/// Exponential gain with mean lambda drawn through `proposal`.
WeightedGain sample_gain(double lambda, const GainProposal& proposal, CounterRng& rng);

/// Stream ids used for per-link substreams of a trial.
namespace stream_ids {
inline constexpr std::uint32_t kLinkPt = 0;
inline constexpr std::uint32_t kLinkPr = 1;
inline constexpr std::uint32_t kLinkTr = 2;
inline constexpr std::uint32_t kNoiseBase = 16;
inline constexpr std::uint32_t kStatusBase = 32;
inline constexpr std::uint32_t kMultiuserPrimaryBase = 1u << 12;
inline constexpr std::uint32_t kMultiuserPairBase = 1u << 16;
}  // namespace stream_ids

/// Draws the three gains, each from its own substream of `rng`.
ChannelSet sample_channel_set(const LinkTriple& links, const CounterRng& rng);

struct WeightedChannelSet {
  ChannelSet channels;
  double weight = 1.0;
};

WeightedChannelSet sample_channel_set(const LinkTriple& links, const GainProposal& proposal,
                                      const CounterRng& rng);

[[nodiscard]] inline double instantaneous_snr(double rho, double gain) noexcept { return rho * gain; }

[[nodiscard]] inline MetricTriple relay_metrics(const ChannelSet& ch) noexcept {
  return {ch.g_pt + ch.g_pr, ch.g_pt + ch.g_tr, ch.g_pr + ch.g_tr};
}

/// Adds independent N(0, sigma^2) noise to each metric. sigma = 0 returns exact copies.
NoisyMetricTriple perturb_metrics(const MetricTriple& m, double sigma, const CounterRng& rng);

/// Gains of an M-pair secondary network. Users 0..M-1 are transmitters and
/// M..2M-1 receivers; pair m is (m, M + m).
class MultiuserChannelSet {
 public:
  MultiuserChannelSet(int pairs, std::vector<double> primary, std::vector<double> mutual);

  [[nodiscard]] int pairs() const noexcept { return pairs_; }
  [[nodiscard]] int users() const noexcept { return 2 * pairs_; }
  [[nodiscard]] double primary(int user) const { return primary_.at(static_cast<std::size_t>(user)); }
  [[nodiscard]] double mutual(int a, int b) const {
    return mutual_.at(static_cast<std::size_t>(a * users() + b));
  }
  [[nodiscard]] static int transmitter(int pair) noexcept { return pair; }
  [[nodiscard]] int receiver(int pair) const noexcept { return pairs_ + pair; }

  /// The pair's own three links as a single-pair channel set.
  [[nodiscard]] ChannelSet pair_channels(int pair) const;

 private:
  int pairs_;
  std::vector<double> primary_;
  std::vector<double> mutual_;  // users x users, symmetric, diagonal zero
};

/// Mean gains for every link of an M-pair network.
struct MultiuserLinks {
  int pairs = 1;
  std::vector<double> primary;  ///< 2M entries
  std::vector<double> mutual;   ///< 2M x 2M symmetric; diagonal ignored

  static MultiuserLinks uniform(int pairs, double lambda);
};

struct WeightedMultiuserChannelSet {
  MultiuserChannelSet channels;
  double weight = 1.0;
};

MultiuserChannelSet sample_multiuser(const MultiuserLinks& links, const CounterRng& rng);
WeightedMultiuserChannelSet sample_multiuser(const MultiuserLinks& links, const GainProposal& proposal,
                                             const CounterRng& rng);

}  // namespace coopbeacon
