#include "coopbeacon/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopbeacon {

// ---------------------------------------------------------------------------
// Config and names

ProtocolConfig ProtocolConfig::with_split(double rho, double alpha, int d) {
  ProtocolConfig cfg;
  cfg.rho = rho;
  cfg.alpha = alpha;
  cfg.d = d;
  cfg.d1 = std::clamp(static_cast<int>(std::lround(alpha * d)), 1, std::max(1, d - 1));
  cfg.d2 = d - cfg.d1;
  cfg.validate();
  return cfg;
}

void ProtocolConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::domain_error("protocol: rho must be positive and finite");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("protocol: alpha must lie in (0, 1)");
  }
  if (d1 < 1 || d2 < 1 || d1 + d2 != d) {
    throw std::domain_error("protocol: need d1 >= 1, d2 >= 1 and d1 + d2 = d");
  }
  if (!(power_budget > 0.0)) {
    throw std::domain_error("protocol: power budget must be positive");
  }
  if (info_bits < 0 || block_length < 0 ||
      (block_length > 0 && static_cast<double>(info_bits) > alpha * block_length)) {
    throw std::domain_error("protocol: need K <= alpha N");
  }
}

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::NC: return "nc";
    case Scheme::CSA: return "csa";
    case Scheme::OCSA: return "ocsa";
    case Scheme::MUCSA: return "mucsa";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "nc") return Scheme::NC;
  if (name == "csa") return Scheme::CSA;
  if (name == "ocsa") return Scheme::OCSA;
  if (name == "mucsa") return Scheme::MUCSA;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(RelayIdentity r) noexcept {
  switch (r) {
    case RelayIdentity::Primary: return "primary";
    case RelayIdentity::SecondaryTx: return "secondary-tx";
    case RelayIdentity::SecondaryRx: return "secondary-rx";
    case RelayIdentity::None: return "none";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Pairwise error terms

namespace {

/// Q(sqrt(2 rho d g)).
double pep(const ProtocolConfig& cfg, int distance, double gain) {
  return gaussian_q(std::sqrt(2.0 * cfg.rho * (distance * gain))).value();
}

/// Phase 1 at distance d1 over the direct link, phase 2 at distance d2 over
/// the relay link with its SNR scaled by `scale`.
double relayed(const ProtocolConfig& cfg, double direct_gain, double relay_gain, double scale) {
  return gaussian_q(std::sqrt(2.0 * cfg.rho * (cfg.d1 * direct_gain + cfg.d2 * scale * relay_gain))).value();
}

StatusProbs status_from(double fail_t, double fail_r) {
  StatusProbs s;
  s.fail_t = fail_t;
  s.fail_r = fail_r;
  s.branch[static_cast<int>(Branch::SS)] = (1.0 - fail_t) * (1.0 - fail_r);
  s.branch[static_cast<int>(Branch::SF)] = (1.0 - fail_t) * fail_r;
  s.branch[static_cast<int>(Branch::FS)] = fail_t * (1.0 - fail_r);
  s.branch[static_cast<int>(Branch::FF)] = fail_t * fail_r;
  return s;
}

template <class Metrics>
TrialOutcome ocsa_expansion(const ProtocolConfig& cfg, const ChannelSet& ch, const Metrics& selection) {
  const StatusProbs s = csa_phase1_status_probs(cfg, ch);
  TrialOutcome out;
  out.status = s;
  out.relay[static_cast<int>(Branch::SS)] = ocsa_select_relay(selection, status_of(Branch::SS));
  out.relay[static_cast<int>(Branch::FF)] = RelayIdentity::Primary;

  // Only T_t decoded: T_r hears the winner of {primary, T_t}.
  const RelayIdentity sf = ocsa_select_relay(selection, status_of(Branch::SF));
  out.relay[static_cast<int>(Branch::SF)] = sf;
  const double r_branch =
      sf == RelayIdentity::SecondaryTx ? relayed(cfg, ch.g_pr, ch.g_tr, 1.0) : pep(cfg, cfg.d, ch.g_pr);

  // Only T_r decoded: T_t hears the winner of {primary, T_r}.
  const RelayIdentity fs = ocsa_select_relay(selection, status_of(Branch::FS));
  out.relay[static_cast<int>(Branch::FS)] = fs;
  const double t_branch =
      fs == RelayIdentity::SecondaryRx ? relayed(cfg, ch.g_pt, ch.g_tr, 1.0) : pep(cfg, cfg.d, ch.g_pt);

  // Neither decoded: the primary sends the full-length beacon.
  const double full_t = pep(cfg, cfg.d, ch.g_pt);
  const double full_r = pep(cfg, cfg.d, ch.g_pr);

  out.p_miss_t = Probability(t_branch * s[Branch::FS] + full_t * s[Branch::FF]);
  out.p_miss_r = Probability(r_branch * s[Branch::SF] + full_r * s[Branch::FF]);
  out.p_joint_failure = Probability(r_branch * s[Branch::SF] + t_branch * s[Branch::FS] +
                                    (full_t + full_r * (1.0 - full_t)) * s[Branch::FF]);
  return out;
}

}  // namespace

Probability nc_conditional_miss(const ProtocolConfig& cfg, double gain) {
  return Probability(pep(cfg, cfg.d, gain));
}

Probability false_alarm_conditional(const ProtocolConfig& cfg, double gain) {
  return nc_conditional_miss(cfg, gain);
}

TrialOutcome nc_outcome(const ProtocolConfig& cfg, const ChannelSet& ch) {
  const double qt = pep(cfg, cfg.d, ch.g_pt);
  const double qr = pep(cfg, cfg.d, ch.g_pr);
  TrialOutcome out;
  out.relay.fill(RelayIdentity::Primary);
  out.status = status_from(qt, qr);
  out.p_miss_t = Probability(qt);
  out.p_miss_r = Probability(qr);
  out.p_joint_failure = Probability(qt + qr * (1.0 - qt));
  return out;
}

StatusProbs csa_phase1_status_probs(const ProtocolConfig& cfg, const ChannelSet& ch) {
  return status_from(pep(cfg, cfg.d1, ch.g_pt), pep(cfg, cfg.d1, ch.g_pr));
}

TrialOutcome csa_conditional_miss(const ProtocolConfig& cfg, const ChannelSet& ch, double relay_power_scale) {
  const StatusProbs s = csa_phase1_status_probs(cfg, ch);
  const double relay_t = relayed(cfg, ch.g_pt, ch.g_tr, relay_power_scale);
  const double relay_r = relayed(cfg, ch.g_pr, ch.g_tr, relay_power_scale);
  TrialOutcome out;
  out.status = s;
  // Both decoders forward when both succeed; the collision is harmless.
  out.relay[static_cast<int>(Branch::SS)] = RelayIdentity::SecondaryTx;
  out.relay[static_cast<int>(Branch::SF)] = RelayIdentity::SecondaryTx;
  out.relay[static_cast<int>(Branch::FS)] = RelayIdentity::SecondaryRx;
  out.relay[static_cast<int>(Branch::FF)] = RelayIdentity::None;
  out.p_miss_t = Probability(relay_t * s[Branch::FS] + s[Branch::FF]);
  out.p_miss_r = Probability(relay_r * s[Branch::SF] + s[Branch::FF]);
  out.p_joint_failure = Probability(relay_r * s[Branch::SF] + relay_t * s[Branch::FS] + 1.0 * s[Branch::FF]);
  return out;
}

RelayIdentity ocsa_select_relay(double t_p, double t_t, double t_r, NodeStatus status) noexcept {
  RelayIdentity winner = RelayIdentity::Primary;
  double best = t_p;
  if (status.t_success && t_t > best) {
    winner = RelayIdentity::SecondaryTx;
    best = t_t;
  }
  if (status.r_success && t_r > best) {
    winner = RelayIdentity::SecondaryRx;
  }
  return winner;
}

RelayIdentity ocsa_select_relay(const MetricTriple& m, NodeStatus status) noexcept {
  return ocsa_select_relay(m.t_p, m.t_t, m.t_r, status);
}

RelayIdentity ocsa_select_relay(const NoisyMetricTriple& m, NodeStatus status) noexcept {
  return ocsa_select_relay(m.tilde_t_p, m.tilde_t_t, m.tilde_t_r, status);
}

TrialOutcome ocsa_conditional_miss(const ProtocolConfig& cfg, const ChannelSet& ch) {
  return ocsa_expansion(cfg, ch, relay_metrics(ch));
}

TrialOutcome ocsa_conditional_miss(const ProtocolConfig& cfg, const ChannelSet& ch,
                                   const NoisyMetricTriple& selection) {
  return ocsa_expansion(cfg, ch, selection);
}

TrialOutcome scheme_outcome(Scheme scheme, const ProtocolConfig& cfg, const ChannelSet& ch) {
  switch (scheme) {
    case Scheme::NC: return nc_outcome(cfg, ch);
    case Scheme::CSA: return csa_conditional_miss(cfg, ch);
    case Scheme::OCSA: return ocsa_conditional_miss(cfg, ch);
    case Scheme::MUCSA: break;
  }
  throw std::invalid_argument("scheme_outcome: MU-CSA needs a multiuser channel set");
}

// ---------------------------------------------------------------------------
// Multiuser

namespace {
void check_user(const MultiuserChannelSet& mch, int user) {
  if (user < 0 || user >= mch.users()) {
    throw std::domain_error("mucsa: user index out of range");
  }
}

double mucsa_relayed(const ProtocolConfig& cfg, int pairs, double direct_gain, double relay_sum) {
  return relayed(cfg, direct_gain, relay_sum, 1.0 / (2.0 * pairs));
}
}  // namespace

Probability mucsa_conditional_miss(const ProtocolConfig& cfg, const MultiuserChannelSet& mch, int user) {
  check_user(mch, user);
  const int pairs = mch.pairs();
  if (pairs > kMaxExactPairs) {
    throw std::length_error("mucsa_conditional_miss: exact subset expansion is limited to M <= " +
                            std::to_string(kMaxExactPairs) + "; use mucsa_sampled_miss (status sampling)");
  }
  const int users = mch.users();
  std::vector<int> others;
  std::vector<double> fail;
  std::vector<double> relay_gain;
  others.reserve(static_cast<std::size_t>(users - 1));
  for (int u = 0; u < users; ++u) {
    if (u != user) {
      others.push_back(u);
      fail.push_back(pep(cfg, cfg.d1, mch.primary(u)));
      relay_gain.push_back(mch.mutual(u, user));
    }
  }
  const double own_fail = pep(cfg, cfg.d1, mch.primary(user));
  const int k = static_cast<int>(others.size());

  double all_fail = own_fail;
  for (double f : fail) {
    all_fail *= f;
  }
  CompensatedSum miss;
  miss.add(all_fail);
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    double relay_sum = 0.0;
    double weight = own_fail;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        relay_sum += relay_gain[static_cast<std::size_t>(i)];
        weight *= 1.0 - fail[static_cast<std::size_t>(i)];
      } else {
        weight *= fail[static_cast<std::size_t>(i)];
      }
    }
    miss.add(mucsa_relayed(cfg, pairs, mch.primary(user), relay_sum) * weight);
  }
  return Probability(miss.value());
}

Probability mucsa_sampled_miss(const ProtocolConfig& cfg, const MultiuserChannelSet& mch, int user,
                               const CounterRng& rng) {
  check_user(mch, user);
  const double own_fail = pep(cfg, cfg.d1, mch.primary(user));
  double relay_sum = 0.0;
  bool any_relay = false;
  for (int u = 0; u < mch.users(); ++u) {
    if (u == user) {
      continue;
    }
    CounterRng s = rng.fork(stream_ids::kStatusBase + static_cast<std::uint32_t>(u));
    if (s.uniform_open0() > pep(cfg, cfg.d1, mch.primary(u))) {
      any_relay = true;
      relay_sum += mch.mutual(u, user);
    }
  }
  if (!any_relay) {
    return Probability(own_fail);
  }
  return Probability(own_fail * mucsa_relayed(cfg, mch.pairs(), mch.primary(user), relay_sum));
}

double backoff_init(double beta, double metric) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("backoff_init: beta must be positive");
  }
  if (!(metric > 0.0)) {
    throw std::domain_error("backoff_init: metric must be positive (timer would be infinite)");
  }
  return beta / metric;
}

}  // namespace coopbeacon
