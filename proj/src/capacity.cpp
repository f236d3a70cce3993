#include "coopbeacon/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "coopbeacon/kernels.hpp"

namespace coopbeacon {

namespace {
constexpr double kLn2 = std::numbers::ln2;

MeanEstimate to_mean(const MomentAccumulator& acc) {
  return {acc.mean(), acc.standard_error(), acc.count()};
}

CapacityEstimate ergodic_from(Scheme scheme, const MomentAccumulator& lower, const MomentAccumulator& upper) {
  CapacityEstimate est;
  est.scheme = scheme;
  est.mode = CapacityMode::Ergodic;
  est.lower = lower.mean();
  est.upper = upper.mean();
  est.lower_std_error = lower.standard_error();
  est.upper_std_error = upper.standard_error();
  est.n_trials = lower.count();
  return est;
}

void check_setup(const CapacitySetup& setup) {
  setup.activity.validate();
  setup.cfg.validate();
  if (setup.n_trials == 0) {
    throw std::domain_error("capacity: n_trials must be >= 1");
  }
}

ChannelSet draw_channels(const CapacitySetup& setup, std::uint64_t trial) {
  return sample_channel_set(setup.links, CounterRng(setup.seed, trial));
}
}  // namespace

void ActivityModel::validate() const {
  if (p_theta_joint > p_theta_t) {
    throw std::domain_error("activity: Pr(both free) cannot exceed Pr(T_t free)");
  }
  if (coherence < 1) {
    throw std::domain_error("activity: coherence time T_c must be >= 1");
  }
}

StateProbs state_probs(const ActivityModel& activity, Probability p_miss_t, Probability p_joint_success) {
  return {activity.p_theta_t.value() * p_miss_t.complement().value(),
          activity.p_theta_joint.value() * p_joint_success.value()};
}

double capacity_upper(double power, double p_joint) {
  if (!(power >= 0.0)) {
    throw std::domain_error("capacity_upper: received power must be nonnegative");
  }
  if (!(p_joint >= 0.0 && p_joint <= 1.0)) {
    throw std::domain_error("capacity_upper: p_joint must lie in [0, 1]");
  }
  if (p_joint == 0.0) {
    return 0.0;
  }
  return p_joint * std::log1p(power / p_joint) / kLn2;
}

double capacity_lower(double power, double p_joint, double p_t, int coherence) {
  if (!(power >= 0.0)) {
    throw std::domain_error("capacity_lower: received power must be nonnegative");
  }
  if (!(p_joint >= 0.0 && p_joint <= p_t && p_t <= 1.0)) {
    throw std::domain_error("capacity_lower: need 0 <= p_joint <= p_t <= 1");
  }
  if (coherence < 1) {
    throw std::domain_error("capacity_lower: T_c must be >= 1");
  }
  const double penalty = 1.0 / (coherence * kLn2);
  if (p_t == 0.0) {
    if (power > 0.0) {
      throw std::domain_error("capacity_lower: Pr(S_t = 1) = 0 with positive power");
    }
    return -penalty;
  }
  return p_joint * std::log1p(power / p_t) / kLn2 - penalty;
}

CapacityBounds realization_capacity(const ActivityModel& activity, const ProtocolConfig& cfg,
                                    const ChannelSet& ch, const TrialOutcome& outcome) {
  const StateProbs s = state_probs(activity, outcome.p_miss_t, outcome.p_joint_success());
  const double power = instantaneous_snr(cfg.rho, ch.g_tr);
  return {capacity_lower(power, s.p_joint, s.p_t, activity.coherence), capacity_upper(power, s.p_joint)};
}

CapacityBounds realization_capacity(Scheme scheme, const ActivityModel& activity, const ProtocolConfig& cfg,
                                    const ChannelSet& ch) {
  return realization_capacity(activity, cfg, ch, scheme_outcome(scheme, cfg, ch));
}

std::string_view to_string(CapacityMode m) noexcept {
  switch (m) {
    case CapacityMode::Ergodic: return "ergodic";
    case CapacityMode::Outage: return "outage";
    case CapacityMode::Conditional: return "conditional";
  }
  return "?";
}

CapacityEstimate ergodic_capacity(Scheme scheme, const CapacitySetup& setup) {
  check_setup(setup);
  const auto acc = accumulate_parallel<2>(
      setup.n_trials,
      [&](std::uint64_t i) {
        const CapacityBounds b = realization_capacity(scheme, setup.activity, setup.cfg, draw_channels(setup, i));
        return std::array<double, 2>{b.lower, b.upper};
      },
      setup.threads);
  return ergodic_from(scheme, acc[0], acc[1]);
}

std::vector<CapacityBounds> capacity_samples(Scheme scheme, const CapacitySetup& setup) {
  check_setup(setup);
  const auto raw = evaluate_parallel<2>(
      setup.n_trials,
      [&](std::uint64_t i) {
        const CapacityBounds b = realization_capacity(scheme, setup.activity, setup.cfg, draw_channels(setup, i));
        return std::array<double, 2>{b.lower, b.upper};
      },
      setup.threads);
  std::vector<CapacityBounds> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    out.push_back({r[0], r[1]});
  }
  return out;
}

std::size_t outage_index(std::size_t n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("outage: epsilon must lie in (0, 1)");
  }
  if (static_cast<double>(n) * epsilon < 100.0) {
    throw std::range_error("outage: need n_trials >= 100/epsilon (have " + std::to_string(n) + ")");
  }
  return std::min(n - 1, static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n))));
}

std::vector<CapacityEstimate> outage_capacity(Scheme scheme, const CapacitySetup& setup,
                                              std::span<const double> epsilons) {
  for (double eps : epsilons) {
    outage_index(setup.n_trials, eps);
  }
  const std::vector<CapacityBounds> samples = capacity_samples(scheme, setup);
  std::vector<double> lower(samples.size());
  std::vector<double> upper(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    lower[i] = samples[i].lower;
    upper[i] = samples[i].upper;
  }
  std::sort(lower.begin(), lower.end());
  std::sort(upper.begin(), upper.end());
  std::vector<CapacityEstimate> out;
  for (double eps : epsilons) {
    const std::size_t k = outage_index(samples.size(), eps);
    CapacityEstimate est;
    est.scheme = scheme;
    est.mode = CapacityMode::Outage;
    est.epsilon = eps;
    est.lower = lower[k];
    est.upper = upper[k];
    est.n_trials = samples.size();
    out.push_back(est);
  }
  return out;
}

CapacityEstimate outage_capacity(Scheme scheme, const CapacitySetup& setup, double epsilon) {
  const double eps[] = {epsilon};
  return outage_capacity(scheme, setup, eps).front();
}

// ---------------------------------------------------------------------------

bool wrong_relay_event(const MetricTriple& truth, const NoisyMetricTriple& noisy, NodeStatus status) {
  return ocsa_select_relay(noisy, status) != ocsa_select_relay(truth, status);
}

namespace {
double pairwise_flip_term(const MetricTriple& m, double sigma) {
  if (sigma == 0.0) {
    return 0.0;
  }
  const double scale = std::sqrt(2.0 * sigma * sigma);
  return (gaussian_q(std::abs(m.t_p - m.t_t) / scale).value() +
          gaussian_q(std::abs(m.t_p - m.t_r) / scale).value()) /
         3.0;
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("sigma must be nonnegative and finite");
  }
}
}  // namespace

WrongRelayEstimate wrong_relay_estimate(double sigma, const CapacitySetup& setup) {
  check_sigma(sigma);
  check_setup(setup);
  const auto acc = accumulate_parallel<3>(
      setup.n_trials,
      [&](std::uint64_t i) {
        const CounterRng rng(setup.seed, i);
        const ChannelSet ch = sample_channel_set(setup.links, rng);
        const MetricTriple truth = relay_metrics(ch);
        const NoisyMetricTriple noisy = perturb_metrics(truth, sigma, rng);
        const StatusProbs s = csa_phase1_status_probs(setup.cfg, ch);
        double wrong = 0.0;
        for (Branch b : {Branch::SS, Branch::SF, Branch::FS}) {
          if (wrong_relay_event(truth, noisy, status_of(b))) {
            wrong += s[b];
          }
        }
        const double bound = pairwise_flip_term(truth, sigma);
        return std::array<double, 3>{wrong, bound, wrong - bound};
      },
      setup.threads);
  return {to_mean(acc[0]), to_mean(acc[1]), to_mean(acc[2])};
}

double wrong_relay_bound(double sigma, const LinkTriple& links, std::uint64_t n_trials, std::uint64_t seed,
                         int threads) {
  check_sigma(sigma);
  if (n_trials == 0) {
    throw std::domain_error("wrong_relay_bound: n_trials must be >= 1");
  }
  const auto acc = accumulate_parallel<1>(
      n_trials,
      [&](std::uint64_t i) {
        const ChannelSet ch = sample_channel_set(links, CounterRng(seed, i));
        return std::array<double, 1>{pairwise_flip_term(relay_metrics(ch), sigma)};
      },
      threads);
  return acc[0].mean();
}

ImperfectEstimate imperfect_capacity(const CapacitySetup& setup, double sigma) {
  check_sigma(sigma);
  check_setup(setup);
  const auto acc = accumulate_parallel<5>(
      setup.n_trials,
      [&](std::uint64_t i) {
        const CounterRng rng(setup.seed, i);
        const ChannelSet ch = sample_channel_set(setup.links, rng);
        const NoisyMetricTriple noisy = perturb_metrics(relay_metrics(ch), sigma, rng);
        const CapacityBounds perfect =
            realization_capacity(setup.activity, setup.cfg, ch, ocsa_conditional_miss(setup.cfg, ch));
        const CapacityBounds degraded =
            realization_capacity(setup.activity, setup.cfg, ch, ocsa_conditional_miss(setup.cfg, ch, noisy));
        const double loss = perfect.upper > 0.0 ? (perfect.upper - degraded.upper) / perfect.upper : 0.0;
        return std::array<double, 5>{degraded.lower, degraded.upper, perfect.lower, perfect.upper, loss};
      },
      setup.threads);
  ImperfectEstimate est;
  est.noisy = ergodic_from(Scheme::OCSA, acc[0], acc[1]);
  est.perfect = ergodic_from(Scheme::OCSA, acc[2], acc[3]);
  est.relative_loss = to_mean(acc[4]);
  return est;
}

// ---------------------------------------------------------------------------

OverheadParams OverheadParams::normalized(double w1, double w2, double lambda_pt) {
  OverheadParams p;
  p.t_cr = 1.0;
  p.t_fb = w1;
  p.beta = w2 * lambda_pt;
  p.lambda_pt = lambda_pt;
  p.validate();
  return p;
}

void OverheadParams::validate() const {
  if (!(t_cr > 0.0) || !std::isfinite(t_cr)) {
    throw std::domain_error("overhead: T_CR must be positive");
  }
  if (!(t_fb >= 0.0) || !(beta >= 0.0)) {
    throw std::domain_error("overhead: T_FB and beta must be nonnegative");
  }
  if (!(lambda_pt > 0.0)) {
    throw std::domain_error("overhead: lambda_pt must be positive");
  }
}

double overhead_fraction(const OverheadParams& overhead, double t_relay) {
  overhead.validate();
  if (!(t_relay > 0.0)) {
    throw std::domain_error("throughput: relay metric must be positive");
  }
  const double wasted = overhead.t_fb + overhead.beta / t_relay;
  return wasted / (overhead.t_cr + wasted);
}

double throughput(const OverheadParams& overhead, double t_relay, double c_tilde) {
  overhead.validate();
  if (!(t_relay > 0.0)) {
    throw std::domain_error("throughput: relay metric must be positive");
  }
  if (!(c_tilde >= 0.0)) {
    throw std::domain_error("throughput: capacity must be nonnegative");
  }
  return overhead.t_cr / (overhead.t_cr + overhead.t_fb + overhead.beta / t_relay) * c_tilde;
}

double throughput_loss_bound(double w1, double w2) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0)) {
    throw std::domain_error("throughput_loss_bound: w1 and w2 must be nonnegative");
  }
  return w1 / (1.0 + w1) + (1.0 + w1) * std::expm1(w2 / (1.0 + w1));
}

ThroughputEstimate throughput_estimate(const CapacitySetup& setup, const OverheadParams& overhead, double sigma) {
  check_sigma(sigma);
  check_setup(setup);
  overhead.validate();
  const auto acc = accumulate_parallel<3>(
      setup.n_trials,
      [&](std::uint64_t i) {
        const CounterRng rng(setup.seed, i);
        const ChannelSet ch = sample_channel_set(setup.links, rng);
        const MetricTriple truth = relay_metrics(ch);
        const NoisyMetricTriple noisy = perturb_metrics(truth, sigma, rng);
        const TrialOutcome out = ocsa_conditional_miss(setup.cfg, ch, noisy);
        const double c_tilde = realization_capacity(setup.activity, setup.cfg, ch, out).upper;
        double loss = 0.0;
        for (Branch b : kAllBranches) {
          double t = truth.t_p;
          switch (out.relay[static_cast<int>(b)]) {
            case RelayIdentity::SecondaryTx: t = truth.t_t; break;
            case RelayIdentity::SecondaryRx: t = truth.t_r; break;
            default: break;
          }
          loss += out.status[b] * overhead_fraction(overhead, t);
        }
        return std::array<double, 3>{(1.0 - loss) * c_tilde, c_tilde, loss};
      },
      setup.threads);
  return {to_mean(acc[0]), to_mean(acc[1]), to_mean(acc[2])};
}

// ---------------------------------------------------------------------------

CapacityEstimate multiuser_pair_capacity(int pair, const MultiuserSetup& setup) {
  setup.activity.validate();
  setup.cfg.validate();
  if (pair < 0 || pair >= setup.links.pairs) {
    throw std::domain_error("multiuser: pair index out of range");
  }
  if (setup.n_trials == 0) {
    throw std::domain_error("multiuser: n_trials must be >= 1");
  }
  const auto acc = accumulate_parallel<2>(
      setup.n_trials,
      [&](std::uint64_t i) {
        const CounterRng rng(setup.seed, i);
        const MultiuserChannelSet mch = sample_multiuser(setup.links, rng);
        const int tx = MultiuserChannelSet::transmitter(pair);
        const int rx = mch.receiver(pair);
        double mt = 0.0;
        double mr = 0.0;
        if (mch.pairs() <= kMaxExactPairs) {
          mt = mucsa_conditional_miss(setup.cfg, mch, tx).value();
          mr = mucsa_conditional_miss(setup.cfg, mch, rx).value();
        } else {
          mt = mucsa_sampled_miss(setup.cfg, mch, tx, rng).value();
          mr = mucsa_sampled_miss(setup.cfg, mch, rx, rng).value();
        }
        const StateProbs s =
            state_probs(setup.activity, Probability(mt), Probability(1.0 - (mt + mr * (1.0 - mt))));
        const double power = instantaneous_snr(setup.cfg.rho, mch.mutual(tx, rx));
        return std::array<double, 2>{capacity_lower(power, s.p_joint, s.p_t, setup.activity.coherence),
                                     capacity_upper(power, s.p_joint)};
      },
      setup.threads);
  return ergodic_from(Scheme::MUCSA, acc[0], acc[1]);
}

}  // namespace coopbeacon
