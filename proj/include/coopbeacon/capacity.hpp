#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "coopbeacon/channel.hpp"
#include "coopbeacon/numerics.hpp"
#include "coopbeacon/protocols.hpp"

namespace coopbeacon {

/// True spectral activity of the primary, seen from the secondary pair.
struct ActivityModel {
  Probability p_theta_t{0.7};      ///< Pr(channel free at T_t)
  Probability p_theta_joint{0.7};  ///< Pr(channel free at both)
  int coherence = 10;              ///< T_c in channel uses

  void validate() const;
};

struct StateProbs {
  double p_t = 0.0;      ///< Pr(S_t = 1)
  double p_joint = 0.0;  ///< Pr(S_t = S_r = 1)
};

StateProbs state_probs(const ActivityModel& activity, Probability p_miss_t, Probability p_joint_success);

/// p log2(1 + P/p); zero at p = 0. Throws std::domain_error for P < 0.
double capacity_upper(double power, double p_joint);

/// p_joint log2(1 + P/p_t) - 1/(T_c ln 2). May be negative.
/// Throws std::domain_error unless p_t >= p_joint >= 0 and T_c >= 1, or when p_t = 0 < P.
double capacity_lower(double power, double p_joint, double p_t, int coherence);

struct CapacityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds for one channel realization, at received power P = rho * g_tr.
CapacityBounds realization_capacity(const ActivityModel& activity, const ProtocolConfig& cfg,
                                    const ChannelSet& ch, const TrialOutcome& outcome);
CapacityBounds realization_capacity(Scheme scheme, const ActivityModel& activity, const ProtocolConfig& cfg,
                                    const ChannelSet& ch);

enum class CapacityMode : std::uint8_t { Ergodic, Outage, Conditional };

std::string_view to_string(CapacityMode m) noexcept;

/// Bits per channel use.
struct CapacityEstimate {
  Scheme scheme = Scheme::NC;
  CapacityMode mode = CapacityMode::Ergodic;
  double epsilon = 0.0;  ///< outage level; 0 for ergodic
  double lower = 0.0;
  double upper = 0.0;
  double lower_std_error = 0.0;  ///< ergodic only
  double upper_std_error = 0.0;
  std::uint64_t n_trials = 0;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_trials = 0;
};

/// Shared Monte Carlo setup. Trial i draws its channels from CounterRng(seed, i).
struct CapacitySetup {
  ActivityModel activity;
  ProtocolConfig cfg;
  LinkTriple links;
  std::uint64_t n_trials = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
};

CapacityEstimate ergodic_capacity(Scheme scheme, const CapacitySetup& setup);

/// Lower empirical epsilon-quantile of the per-realization bounds.
/// Throws std::range_error when n_trials < 100 / epsilon.
CapacityEstimate outage_capacity(Scheme scheme, const CapacitySetup& setup, double epsilon);

/// Same, for several levels from one set of draws.
std::vector<CapacityEstimate> outage_capacity(Scheme scheme, const CapacitySetup& setup,
                                              std::span<const double> epsilons);

/// Per-realization bounds in trial order.
std::vector<CapacityBounds> capacity_samples(Scheme scheme, const CapacitySetup& setup);

/// Index of the lower empirical epsilon-quantile in a sorted sample of size n.
std::size_t outage_index(std::size_t n, double epsilon);

// ---------------------------------------------------------------------------
// Imperfect metric estimates

/// True when noisy estimates change the OCSA phase-2 sender for this status.
bool wrong_relay_event(const MetricTriple& truth, const NoisyMetricTriple& noisy, NodeStatus status);

struct WrongRelayEstimate {
  MeanEstimate probability;  ///< status-weighted Pr(wrong phase-2 sender)
  MeanEstimate bound;        ///< (1/3) E[Q(|tp-tt|/sqrt(2 s^2)) + Q(|tp-tr|/sqrt(2 s^2))]
  MeanEstimate excess;       ///< probability - bound, paired per trial
};

/// Both sides from the same draws. Phase-1 statuses are weighted by their
/// probabilities at cfg.rho; the primary-only branch never picks a wrong sender.
WrongRelayEstimate wrong_relay_estimate(double sigma, const CapacitySetup& setup);

/// Monte Carlo value of the pairwise-flip bound; 0 at sigma = 0.
double wrong_relay_bound(double sigma, const LinkTriple& links, std::uint64_t n_trials, std::uint64_t seed,
                         int threads = 0);

struct ImperfectEstimate {
  CapacityEstimate noisy;    ///< OCSA with the sender chosen from noisy metrics
  CapacityEstimate perfect;  ///< OCSA ergodic on the same draws
  MeanEstimate relative_loss;  ///< E[(C^U - C~^U) / C^U]
};

ImperfectEstimate imperfect_capacity(const CapacitySetup& setup, double sigma);

// ---------------------------------------------------------------------------
// MAC overhead

struct OverheadParams {
  double t_cr = 1.0;       ///< channel hold time
  double t_fb = 0.0;       ///< feedback time
  double beta = 0.0;       ///< backoff timer constant
  double lambda_pt = 1.0;  ///< mean gain of the primary-to-Tx link

  [[nodiscard]] double w1() const noexcept { return t_fb / t_cr; }
  [[nodiscard]] double w2() const noexcept { return beta / (t_cr * lambda_pt); }

  /// T_CR = 1, T_FB = w1, beta = w2 * lambda_pt.
  static OverheadParams normalized(double w1, double w2, double lambda_pt = 1.0);
  void validate() const;
};

/// T_CR / (T_CR + T_FB + beta / t_relay) * c_tilde.
double throughput(const OverheadParams& overhead, double t_relay, double c_tilde);

/// Fraction of time lost to feedback and backoff for a sender with metric t_relay.
double overhead_fraction(const OverheadParams& overhead, double t_relay);

/// w1/(1+w1) + (1+w1)(exp(w2/(1+w1)) - 1).
double throughput_loss_bound(double w1, double w2);

struct ThroughputEstimate {
  MeanEstimate throughput;     ///< E[R], upper capacity bound discounted
  MeanEstimate capacity;       ///< E[C~^U] on the same draws
  MeanEstimate relative_loss;  ///< E[(C~ - R) / C~]
};

/// OCSA throughput. Per realization the timer delay is averaged over the
/// phase-1 branches with the winning sender's true metric.
ThroughputEstimate throughput_estimate(const CapacitySetup& setup, const OverheadParams& overhead,
                                       double sigma = 0.0);

// ---------------------------------------------------------------------------
// Multiuser

struct MultiuserSetup {
  ActivityModel activity;
  ProtocolConfig cfg;
  MultiuserLinks links = MultiuserLinks::uniform(1, 1.0);
  std::uint64_t n_trials = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
};

/// Ergodic bounds of pair `pair` when only that pair uses the channel, with
/// joint success (1 - miss_t)(1 - miss_r) under MU-CSA detection.
CapacityEstimate multiuser_pair_capacity(int pair, const MultiuserSetup& setup);

}  // namespace coopbeacon
