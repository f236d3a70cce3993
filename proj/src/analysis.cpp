#include "coopbeacon/analysis.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "coopbeacon/kernels.hpp"

namespace coopbeacon {

std::string_view to_string(Sampler s) noexcept {
  return s == Sampler::Plain ? "plain" : "deep-fade";
}

Sampler sampler_from_string(std::string_view name) {
  if (name == "plain") return Sampler::Plain;
  if (name == "deep-fade") return Sampler::DeepFade;
  throw std::invalid_argument("unknown sampler '" + std::string(name) + "' (plain | deep-fade)");
}

std::string_view to_string(NodeKind n) noexcept {
  switch (n) {
    case NodeKind::Tx: return "tx";
    case NodeKind::Rx: return "rx";
    case NodeKind::Joint: return "joint";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (rho_grid_db.empty()) {
    throw std::domain_error("sweep: rho grid is empty");
  }
  for (std::size_t i = 1; i < rho_grid_db.size(); ++i) {
    if (!(rho_grid_db[i] > rho_grid_db[i - 1])) {
      throw std::domain_error("sweep: rho grid must be strictly increasing");
    }
  }
  if (n_trials == 0) {
    throw std::domain_error("sweep: n_trials must be >= 1");
  }
  if (scheme == Scheme::MUCSA) {
    if (pairs < 1 || multiuser.pairs != pairs) {
      throw std::domain_error("sweep: multiuser links do not match the number of pairs");
    }
  }
  ProtocolConfig probe = cfg;
  probe.rho = db_to_linear(rho_grid_db.front());
  probe.validate();
}

std::array<double, 3> sweep_trial(const SweepSpec& spec, const ProtocolConfig& cfg, std::uint64_t trial) {
  const CounterRng rng(spec.seed, trial);
  const GainProposal proposal =
      spec.sampler == Sampler::DeepFade ? GainProposal::deep_fade(cfg.rho) : GainProposal::plain();

  if (spec.scheme == Scheme::MUCSA) {
    const WeightedMultiuserChannelSet draw = sample_multiuser(spec.multiuser, proposal, rng);
    const MultiuserChannelSet& mch = draw.channels;
    const int tx = MultiuserChannelSet::transmitter(0);
    const int rx = mch.receiver(0);
    double mt = 0.0;
    double mr = 0.0;
    if (mch.pairs() <= kMaxExactPairs) {
      mt = mucsa_conditional_miss(cfg, mch, tx).value();
      mr = mucsa_conditional_miss(cfg, mch, rx).value();
    } else {
      mt = mucsa_sampled_miss(cfg, mch, tx, rng).value();
      mr = mucsa_sampled_miss(cfg, mch, rx, rng).value();
    }
    const double w = draw.weight;
    return {w * mt, w * mr, w * (mt + mr * (1.0 - mt))};
  }

  const WeightedChannelSet draw = sample_channel_set(spec.links, proposal, rng);
  const TrialOutcome out = scheme_outcome(spec.scheme, cfg, draw.channels);
  const double w = draw.weight;
  return {w * out.p_miss_t.value(), w * out.p_miss_r.value(), w * out.p_joint_failure.value()};
}

namespace {

struct GridMoments {
  std::vector<MomentBlock<3>> per_point;
  double wall_seconds = 0.0;
};

GridMoments run_grid(const SweepSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  GridMoments out;
  for (double rho_db : spec.rho_grid_db) {
    ProtocolConfig cfg = spec.cfg;
    cfg.rho = db_to_linear(rho_db);
    out.per_point.push_back(accumulate_parallel<3>(
        spec.n_trials, [&](std::uint64_t i) { return sweep_trial(spec, cfg, i); }, spec.threads));
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

SweepResult estimate_miss_curve(const SweepSpec& spec) {
  const GridMoments m = run_grid(spec);
  SweepResult res{spec, {}, m.wall_seconds};
  for (std::size_t i = 0; i < spec.rho_grid_db.size(); ++i) {
    for (NodeKind node : {NodeKind::Tx, NodeKind::Rx}) {
      const MomentAccumulator& acc = m.per_point[i][node == NodeKind::Tx ? 0 : 1];
      res.points.push_back({spec.rho_grid_db[i], spec.scheme, node, acc.mean(), acc.standard_error(), acc.count()});
    }
  }
  return res;
}

SweepResult estimate_joint_success_curve(const SweepSpec& spec) {
  const GridMoments m = run_grid(spec);
  SweepResult res{spec, {}, m.wall_seconds};
  for (std::size_t i = 0; i < spec.rho_grid_db.size(); ++i) {
    const MomentAccumulator& acc = m.per_point[i][2];
    res.points.push_back(
        {spec.rho_grid_db[i], spec.scheme, NodeKind::Joint, 1.0 - acc.mean(), acc.standard_error(), acc.count()});
  }
  return res;
}

std::vector<double> default_diversity_grid() {
  std::vector<double> grid;
  for (int db = 20; db <= 40; db += 2) {
    grid.push_back(db);
  }
  return grid;
}

DiversityEstimate estimate_diversity(const SweepSpec& spec, std::pair<double, double> window_db) {
  SweepSpec windowed = spec;
  windowed.rho_grid_db.clear();
  for (double db : spec.rho_grid_db) {
    if (db >= window_db.first && db <= window_db.second) {
      windowed.rho_grid_db.push_back(db);
    }
  }
  if (windowed.rho_grid_db.size() < 3) {
    throw std::domain_error("diversity: the fit window must contain at least 3 grid points");
  }
  DiversityEstimate est;
  est.curve = estimate_miss_curve(windowed);
  std::vector<std::pair<double, double>> tx;
  std::vector<std::pair<double, double>> rx;
  for (const SweepPoint& p : est.curve.points) {
    (p.node == NodeKind::Tx ? tx : rx).emplace_back(db_to_linear(p.rho_db), p.estimate);
  }
  est.fit = fit_diversity_slope(tx);
  est.fit_rx = fit_diversity_slope(rx);
  return est;
}

}  // namespace coopbeacon
