#include "coopbeacon/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace coopbeacon {

namespace {
void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string(what) + " must be positive and finite");
  }
}
}  // namespace

LinkParams LinkParams::direct(double lambda) {
  require_positive(lambda, "link lambda");
  return LinkParams(lambda);
}

LinkParams LinkParams::pathloss(double shadowing, double distance, double exponent) {
  require_positive(shadowing, "shadowing");
  require_positive(distance, "distance");
  require_positive(exponent, "path-loss exponent");
  const double lambda = shadowing * std::pow(distance, -exponent);
  require_positive(lambda, "resolved lambda");
  LinkParams p(lambda);
  p.shadowing_ = shadowing;
  p.distance_ = distance;
  p.exponent_ = exponent;
  return p;
}

WeightedGain sample_gain(double lambda, const GainProposal& proposal, CounterRng& rng) {
  require_positive(lambda, "link lambda");
  if (proposal.tilt_weight <= 0.0) {
    return {-lambda * std::log(rng.uniform_open0()), 1.0};
  }
  const double pi = proposal.tilt_weight;
  const double mu = std::min(lambda, proposal.tilt_mean);
  const bool tilted = rng.uniform_open0() <= pi;
  const double g = -(tilted ? mu : lambda) * std::log(rng.uniform_open0());
  // p/q = 1 / ((1 - pi) + pi (lambda/mu) exp(-g (1/mu - 1/lambda))); the exponent is <= 0.
  const double ratio = (lambda / mu) * std::exp(-g * (1.0 / mu - 1.0 / lambda));
  return {g, 1.0 / ((1.0 - pi) + pi * ratio)};
}

ChannelSet sample_channel_set(const LinkTriple& links, const CounterRng& rng) {
  return sample_channel_set(links, GainProposal::plain(), rng).channels;
}

WeightedChannelSet sample_channel_set(const LinkTriple& links, const GainProposal& proposal,
                                      const CounterRng& rng) {
  CounterRng s_pt = rng.fork(stream_ids::kLinkPt);
  CounterRng s_pr = rng.fork(stream_ids::kLinkPr);
  CounterRng s_tr = rng.fork(stream_ids::kLinkTr);
  const WeightedGain pt = sample_gain(links.pt.lambda(), proposal, s_pt);
  const WeightedGain pr = sample_gain(links.pr.lambda(), proposal, s_pr);
  const WeightedGain tr = sample_gain(links.tr.lambda(), proposal, s_tr);
  return {{pt.gain, pr.gain, tr.gain}, pt.weight * pr.weight * tr.weight};
}

NoisyMetricTriple perturb_metrics(const MetricTriple& m, double sigma, const CounterRng& rng) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("perturb_metrics: sigma must be nonnegative");
  }
  if (sigma == 0.0) {
    return {m.t_p, m.t_t, m.t_r, 0.0};
  }
  CounterRng np = rng.fork(stream_ids::kNoiseBase + 0);
  CounterRng nt = rng.fork(stream_ids::kNoiseBase + 1);
  CounterRng nr = rng.fork(stream_ids::kNoiseBase + 2);
  return {m.t_p + sigma * np.normal(), m.t_t + sigma * nt.normal(), m.t_r + sigma * nr.normal(), sigma};
}

MultiuserChannelSet::MultiuserChannelSet(int pairs, std::vector<double> primary, std::vector<double> mutual)
    : pairs_(pairs), primary_(std::move(primary)), mutual_(std::move(mutual)) {
  if (pairs_ < 1) {
    throw std::domain_error("multiuser network needs at least one pair");
  }
  const auto n = static_cast<std::size_t>(users());
  if (primary_.size() != n || mutual_.size() != n * n) {
    throw std::domain_error("multiuser gain arrays have the wrong size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(primary_[i] >= 0.0)) {
      throw std::domain_error("multiuser gains must be nonnegative");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mutual_[i * n + j] >= 0.0) || mutual_[i * n + j] != mutual_[j * n + i]) {
        throw std::domain_error("inter-user gains must be nonnegative and symmetric");
      }
    }
  }
}

ChannelSet MultiuserChannelSet::pair_channels(int pair) const {
  const int t = transmitter(pair);
  const int r = receiver(pair);
  return {primary(t), primary(r), mutual(t, r)};
}

MultiuserLinks MultiuserLinks::uniform(int pairs, double lambda) {
  if (pairs < 1) {
    throw std::domain_error("multiuser network needs at least one pair");
  }
  require_positive(lambda, "link lambda");
  const auto n = static_cast<std::size_t>(2 * pairs);
  MultiuserLinks links;
  links.pairs = pairs;
  links.primary.assign(n, lambda);
  links.mutual.assign(n * n, lambda);
  return links;
}

MultiuserChannelSet sample_multiuser(const MultiuserLinks& links, const CounterRng& rng) {
  return sample_multiuser(links, GainProposal::plain(), rng).channels;
}

WeightedMultiuserChannelSet sample_multiuser(const MultiuserLinks& links, const GainProposal& proposal,
                                             const CounterRng& rng) {
  if (links.pairs < 1) {
    throw std::domain_error("multiuser network needs at least one pair");
  }
  const int users = 2 * links.pairs;
  const auto n = static_cast<std::size_t>(users);
  if (links.primary.size() != n || links.mutual.size() != n * n) {
    throw std::domain_error("multiuser lambda spec must cover all 2M primary and inter-user links");
  }
  std::vector<double> primary(n);
  std::vector<double> mutual(n * n, 0.0);
  double weight = 1.0;
  for (int u = 0; u < users; ++u) {
    CounterRng s = rng.fork(stream_ids::kMultiuserPrimaryBase + static_cast<std::uint32_t>(u));
    const WeightedGain g = sample_gain(links.primary[static_cast<std::size_t>(u)], proposal, s);
    primary[static_cast<std::size_t>(u)] = g.gain;
    weight *= g.weight;
  }
  for (int a = 0; a < users; ++a) {
    for (int b = a + 1; b < users; ++b) {
      const auto ia = static_cast<std::size_t>(a);
      const auto ib = static_cast<std::size_t>(b);
      if (links.mutual[ia * n + ib] != links.mutual[ib * n + ia]) {
        throw std::domain_error("inter-user lambda spec must be symmetric");
      }
      CounterRng s = rng.fork(stream_ids::kMultiuserPairBase + static_cast<std::uint32_t>(a * users + b));
      const WeightedGain g = sample_gain(links.mutual[ia * n + ib], proposal, s);
      mutual[ia * n + ib] = g.gain;
      mutual[ib * n + ia] = g.gain;
      weight *= g.weight;
    }
  }
  return {MultiuserChannelSet(links.pairs, std::move(primary), std::move(mutual)), weight};
}

}  // namespace coopbeacon
