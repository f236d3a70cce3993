#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "coopbeacon/channel.hpp"
#include "coopbeacon/numerics.hpp"

namespace coopbeacon {

/// Beacon code split and operating point shared by all protocols.
///
/// The beacon spans N channel uses at total Hamming distance d. The primary
/// sends the first alpha*N uses (distance d1); the phase-2 sender contributes
/// the remaining parity (distance d2 = d - d1).
struct ProtocolConfig {
  double rho = 1.0;  ///< SNR without fading, P_p / N_0 (linear)
  double alpha = 0.5;
  int d = 2;
  int d1 = 1;
  int d2 = 1;
  double power_budget = 1.0;
  int info_bits = 0;     ///< informational only
  int block_length = 0;  ///< informational only

  /// Split d proportionally to alpha: d1 = round(alpha d) clamped to [1, d-1].
  static ProtocolConfig with_split(double rho, double alpha, int d);

  /// Throws std::domain_error when an invariant is violated.
  void validate() const;
};

enum class Scheme : std::uint8_t { NC, CSA, OCSA, MUCSA };

std::string_view to_string(Scheme s) noexcept;
Scheme scheme_from_string(std::string_view name);

enum class RelayIdentity : std::uint8_t { Primary, SecondaryTx, SecondaryRx, None };

std::string_view to_string(RelayIdentity r) noexcept;

struct NodeStatus {
  bool t_success = false;
  bool r_success = false;
};

/// Phase-1 branch, named by (T_t status, T_r status).
enum class Branch : std::uint8_t { SS = 0, SF = 1, FS = 2, FF = 3 };

inline constexpr std::array<Branch, 4> kAllBranches = {Branch::SS, Branch::SF, Branch::FS, Branch::FF};

[[nodiscard]] constexpr NodeStatus status_of(Branch b) noexcept {
  return {b == Branch::SS || b == Branch::SF, b == Branch::SS || b == Branch::FS};
}

/// Probabilities of the four phase-1 outcomes; decoding noise is independent
/// at the two secondaries, so the joint terms are products.
struct StatusProbs {
  double fail_t = 0.0;
  double fail_r = 0.0;
  std::array<double, 4> branch{};  ///< indexed by Branch

  [[nodiscard]] double operator[](Branch b) const noexcept { return branch[static_cast<int>(b)]; }
};

/// Conditional (given one channel realization) detection outcome.
///
/// Probabilities are stored as the small quantities (misses and joint
/// failure) so that orderings between schemes survive rounding near 1.
struct TrialOutcome {
  std::array<RelayIdentity, 4> relay{};  ///< phase-2 sender per Branch
  Probability p_miss_t;
  Probability p_miss_r;
  Probability p_joint_failure;  ///< 1 - P(both decode)
  StatusProbs status;

  [[nodiscard]] Probability p_joint_success() const noexcept { return p_joint_failure.complement(); }
};

/// Q(sqrt(2 d rho g)): pairwise error of a distance-d codeword over gain g.
Probability nc_conditional_miss(const ProtocolConfig& cfg, double gain);

/// Beacon false-alarm probability; coincides with the miss probability.
Probability false_alarm_conditional(const ProtocolConfig& cfg, double gain);

TrialOutcome nc_outcome(const ProtocolConfig& cfg, const ChannelSet& ch);

StatusProbs csa_phase1_status_probs(const ProtocolConfig& cfg, const ChannelSet& ch);

/// CSA expansion over phase-1 branches. `relay_power_scale` scales the
/// phase-2 SNR (1 for CSA; the MU-CSA per-relay power cap uses 1/(2M)).
TrialOutcome csa_conditional_miss(const ProtocolConfig& cfg, const ChannelSet& ch,
                                  double relay_power_scale = 1.0);

/// OCSA phase-2 sender. The primary always competes; a secondary competes
/// only if it decoded phase 1. The largest metric among the competitors
/// wins, exact ties resolved Primary > SecondaryTx > SecondaryRx.
RelayIdentity ocsa_select_relay(double t_p, double t_t, double t_r, NodeStatus status) noexcept;
RelayIdentity ocsa_select_relay(const MetricTriple& m, NodeStatus status) noexcept;
RelayIdentity ocsa_select_relay(const NoisyMetricTriple& m, NodeStatus status) noexcept;

TrialOutcome ocsa_conditional_miss(const ProtocolConfig& cfg, const ChannelSet& ch);

/// OCSA outcome when the phase-2 sender is chosen from estimated metrics.
TrialOutcome ocsa_conditional_miss(const ProtocolConfig& cfg, const ChannelSet& ch,
                                   const NoisyMetricTriple& selection);

/// Conditional outcome for the single-pair schemes.
TrialOutcome scheme_outcome(Scheme scheme, const ProtocolConfig& cfg, const ChannelSet& ch);

/// Largest M for which the MU-CSA subset expansion is evaluated exactly.
inline constexpr int kMaxExactPairs = 6;

/// MU-CSA miss probability of `user` (0-based, in [0, 2M)) by exact expansion over
/// which other users decoded phase 1. Cost 2^(2M-1); throws std::length_error for M > 6.
Probability mucsa_conditional_miss(const ProtocolConfig& cfg, const MultiuserChannelSet& mch, int user);

/// Unbiased single-sample alternative for large M: draws the phase-1 status
/// of every other user and keeps only the user's own failure analytic.
Probability mucsa_sampled_miss(const ProtocolConfig& cfg, const MultiuserChannelSet& mch, int user,
                               const CounterRng& rng);

/// Backoff timer beta / t; larger metrics expire first.
double backoff_init(double beta, double metric);

}  // namespace coopbeacon
