#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "coopbeacon/channel.hpp"
#include "coopbeacon/numerics.hpp"
#include "coopbeacon/protocols.hpp"

namespace coopbeacon {

/// How channel gains are drawn for miss-probability sweeps.
enum class Sampler : std::uint8_t {
  Plain,     ///< gains from their fading law, unit weights
  DeepFade,  ///< defensive mixture tilted toward gains of order 1/rho
};

std::string_view to_string(Sampler s) noexcept;
Sampler sampler_from_string(std::string_view name);

struct SweepSpec {
  Scheme scheme = Scheme::NC;
  int pairs = 1;  ///< M for MU-CSA
  std::vector<double> rho_grid_db;
  LinkTriple links;
  MultiuserLinks multiuser = MultiuserLinks::uniform(1, 1.0);
  ProtocolConfig cfg;  ///< rho is overwritten per grid point
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::DeepFade;
  int threads = 0;  ///< 0 = OpenMP default

  /// Throws std::domain_error on an empty or non-increasing grid, n_trials == 0,
  /// or multiuser links that do not match `pairs`.
  void validate() const;
};

enum class NodeKind : std::uint8_t { Tx, Rx, Joint };

std::string_view to_string(NodeKind n) noexcept;

struct SweepPoint {
  double rho_db = 0.0;
  Scheme scheme = Scheme::NC;
  NodeKind node = NodeKind::Tx;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_trials = 0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;
  double wall_seconds = 0.0;
};

/// Per-node miss probabilities (Tx then Rx) for every grid point. For MU-CSA
/// the nodes are the two users of pair 0.
SweepResult estimate_miss_curve(const SweepSpec& spec);

/// Probability that both secondaries detect the beacon.
SweepResult estimate_joint_success_curve(const SweepSpec& spec);

struct DiversityEstimate {
  SlopeFit fit;        ///< fitted on the Tx miss curve
  SlopeFit fit_rx;
  SweepResult curve;   ///< the window's miss curve
};

/// Fits the log-log slope of the miss curve over grid points in [lo_db, hi_db].
/// Throws std::domain_error when fewer than three grid points fall in the window.
DiversityEstimate estimate_diversity(const SweepSpec& spec, std::pair<double, double> window_db = {20.0, 40.0});

/// Default diversity grid: 20, 22, ..., 40 dB.
std::vector<double> default_diversity_grid();

/// Conditional outcome of one trial for any single-pair scheme, or MU-CSA pair 0.
/// Returns (miss Tx, miss Rx, joint failure) weighted by the sampler's likelihood ratio.
std::array<double, 3> sweep_trial(const SweepSpec& spec, const ProtocolConfig& cfg, std::uint64_t trial);

}  // namespace coopbeacon
