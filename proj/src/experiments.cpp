#include "coopbeacon/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coopbeacon/analysis.hpp"
#include "coopbeacon/capacity.hpp"
#include "coopbeacon/numerics.hpp"

namespace coopbeacon {

namespace {

std::string scheme_label(Scheme s, int pairs) {
  if (s == Scheme::MUCSA) {
    return "mucsa-m" + std::to_string(pairs);
  }
  return std::string(to_string(s));
}

std::string g10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double shown_lower(const ExperimentConfig& cfg, double v) { return cfg.clamp_lower ? std::max(0.0, v) : v; }

CapacityEstimate ergodic_for(Scheme s, const ExperimentConfig& cfg, double rho_db) {
  if (s == Scheme::MUCSA) {
    return multiuser_pair_capacity(cfg.pair_index, cfg.multiuser_setup(cfg.pairs.front(), rho_db));
  }
  return ergodic_capacity(s, cfg.capacity_setup(rho_db));
}

Table miss_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "scheme", "node", "p_miss", "stderr"}, {}};
  for (Scheme s : cfg.schemes) {
    const SweepResult res = estimate_miss_curve(cfg.sweep(s));
    for (const SweepPoint& p : res.points) {
      const std::string label = scheme_label(s, res.spec.pairs);
      t.add_row({p.rho_db, label, std::string(to_string(p.node)), p.estimate, p.std_error});
      log << "rho_db=" << g10(p.rho_db) << " scheme=" << label << " node=" << to_string(p.node)
          << " p_miss=" << g10(p.estimate) << " stderr=" << g10(p.std_error) << '\n';
    }
    log << "# " << scheme_label(s, res.spec.pairs) << " wall_seconds=" << g10(res.wall_seconds) << '\n';
  }
  return t;
}

Table joint_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "scheme", "p_joint_success", "stderr"}, {}};
  for (Scheme s : cfg.schemes) {
    const SweepResult res = estimate_joint_success_curve(cfg.sweep(s));
    for (const SweepPoint& p : res.points) {
      const std::string label = scheme_label(s, res.spec.pairs);
      t.add_row({p.rho_db, label, p.estimate, p.std_error});
      log << "rho_db=" << g10(p.rho_db) << " scheme=" << label << " p_joint_success=" << g10(p.estimate)
          << " stderr=" << g10(p.std_error) << '\n';
    }
  }
  return t;
}

Table diversity(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"scheme", "node", "diversity", "intercept", "residual", "fit_lo_db", "fit_hi_db", "points"}, {}};
  for (Scheme s : cfg.schemes) {
    const DiversityEstimate est = estimate_diversity(cfg.sweep(s), {cfg.fit_lo_db, cfg.fit_hi_db});
    const std::string label = scheme_label(s, est.curve.spec.pairs);
    for (const auto& [node, fit] : {std::pair{NodeKind::Tx, &est.fit}, std::pair{NodeKind::Rx, &est.fit_rx}}) {
      t.add_row({label, std::string(to_string(node)), fit->slope, fit->intercept, fit->residual, cfg.fit_lo_db,
                 cfg.fit_hi_db, static_cast<std::int64_t>(fit->points.size())});
      log << "scheme=" << label << " node=" << to_string(node) << " diversity=" << g10(fit->slope) << '\n';
    }
  }
  return t;
}

Table capacity_ergodic(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "scheme", "lower", "upper", "lower_stderr", "upper_stderr"}, {}};
  for (double rho_db : cfg.rho_grid_db) {
    for (Scheme s : cfg.schemes) {
      const CapacityEstimate est = ergodic_for(s, cfg, rho_db);
      const std::string label = scheme_label(s, cfg.pairs.front());
      t.add_row({rho_db, label, shown_lower(cfg, est.lower), est.upper, est.lower_std_error, est.upper_std_error});
      log << "rho_db=" << g10(rho_db) << " scheme=" << label << " lower=" << g10(est.lower)
          << " upper=" << g10(est.upper) << '\n';
    }
  }
  return t;
}

Table capacity_outage(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "scheme", "epsilon", "lower", "upper"}, {}};
  for (double rho_db : cfg.rho_grid_db) {
    for (Scheme s : cfg.schemes) {
      if (s == Scheme::MUCSA) {
        throw std::invalid_argument("capacity-outage supports nc, csa and ocsa");
      }
      for (const CapacityEstimate& est : outage_capacity(s, cfg.capacity_setup(rho_db), cfg.epsilons)) {
        t.add_row({rho_db, std::string(to_string(s)), est.epsilon, shown_lower(cfg, est.lower), est.upper});
        log << "rho_db=" << g10(rho_db) << " scheme=" << to_string(s) << " epsilon=" << g10(est.epsilon)
            << " lower=" << g10(est.lower) << " upper=" << g10(est.upper) << '\n';
      }
    }
  }
  return t;
}

Table imperfect(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "sigma2", "wrong_relay", "wrong_relay_stderr", "wrong_relay_bound", "lower", "upper",
           "perfect_upper", "relative_loss", "relative_loss_stderr"},
          {}};
  for (double rho_db : cfg.rho_grid_db) {
    const CapacitySetup setup = cfg.capacity_setup(rho_db);
    for (double s2 : cfg.sigma2) {
      if (!(s2 >= 0.0)) {
        throw std::domain_error("imperfect: sigma2 must be nonnegative");
      }
      const double sigma = std::sqrt(s2);
      const WrongRelayEstimate wr = wrong_relay_estimate(sigma, setup);
      const ImperfectEstimate im = imperfect_capacity(setup, sigma);
      t.add_row({rho_db, s2, wr.probability.mean, wr.probability.std_error, wr.bound.mean,
                 shown_lower(cfg, im.noisy.lower), im.noisy.upper, im.perfect.upper, im.relative_loss.mean,
                 im.relative_loss.std_error});
      log << "rho_db=" << g10(rho_db) << " sigma2=" << g10(s2) << " wrong_relay=" << g10(wr.probability.mean)
          << " bound=" << g10(wr.bound.mean) << " relative_loss=" << g10(im.relative_loss.mean) << '\n';
    }
  }
  return t;
}

Table throughput_table(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "w1", "w2", "throughput", "capacity", "relative_loss", "relative_loss_stderr", "loss_bound"},
          {}};
  for (double rho_db : cfg.rho_grid_db) {
    const CapacitySetup setup = cfg.capacity_setup(rho_db);
    for (double w1 : cfg.w1) {
      for (double w2 : cfg.w2) {
        const ThroughputEstimate est = throughput_estimate(setup, OverheadParams::normalized(w1, w2, cfg.lambda_pt));
        const double bound = throughput_loss_bound(w1, w2);
        t.add_row({rho_db, w1, w2, est.throughput.mean, est.capacity.mean, est.relative_loss.mean,
                   est.relative_loss.std_error, bound});
        log << "rho_db=" << g10(rho_db) << " w1=" << g10(w1) << " w2=" << g10(w2)
            << " relative_loss=" << g10(est.relative_loss.mean) << " bound=" << g10(bound) << '\n';
      }
    }
  }
  return t;
}

Table multiuser(const ExperimentConfig& cfg, std::ostream& log) {
  Table t{{"rho_db", "pairs", "pair", "lower", "upper", "lower_stderr", "upper_stderr"}, {}};
  for (double rho_db : cfg.rho_grid_db) {
    for (int m : cfg.pairs) {
      const CapacityEstimate est = multiuser_pair_capacity(cfg.pair_index, cfg.multiuser_setup(m, rho_db));
      t.add_row({rho_db, static_cast<std::int64_t>(m), static_cast<std::int64_t>(cfg.pair_index),
                 shown_lower(cfg, est.lower), est.upper, est.lower_std_error, est.upper_std_error});
      log << "rho_db=" << g10(rho_db) << " pairs=" << m << " lower=" << g10(est.lower)
          << " upper=" << g10(est.upper) << '\n';
    }
  }
  return t;
}

Table selfcheck_table(std::ostream& log) {
  Table t{{"check", "status", "detail"}, {}};
  for (const SelfCheck& c : run_selfcheck()) {
    t.add_row({c.name, std::string(c.passed ? "pass" : "fail"), c.detail});
    log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  return t;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"miss-sweep",       "joint-sweep", "diversity",
                                                 "capacity-ergodic", "capacity-outage", "imperfect",
                                                 "throughput",       "multiuser",   "selfcheck"};
  return kinds;
}

Table run_experiment(std::string_view kind, const ExperimentConfig& cfg, std::ostream& log) {
  if (kind == "miss-sweep") return miss_sweep(cfg, log);
  if (kind == "joint-sweep") return joint_sweep(cfg, log);
  if (kind == "diversity") return diversity(cfg, log);
  if (kind == "capacity-ergodic") return capacity_ergodic(cfg, log);
  if (kind == "capacity-outage") return capacity_outage(cfg, log);
  if (kind == "imperfect") return imperfect(cfg, log);
  if (kind == "throughput") return throughput_table(cfg, log);
  if (kind == "multiuser") return multiuser(cfg, log);
  if (kind == "selfcheck") return selfcheck_table(log);
  throw ConfigError("unknown experiment kind '" + std::string(kind) + "'");
}

// ---------------------------------------------------------------------------

std::vector<SelfCheck> run_selfcheck() {
  std::vector<SelfCheck> out;

  {
    int bad = 0;
    for (int m = 1; m <= 15; ++m) {
      for (int n = 0; n < m; ++n) {
        bad += alternating_moment(m, n) != 0;
      }
      bad += alternating_moment(m, m) == 0;
    }
    out.push_back({"alternating_moment", bad == 0,
                   "A(M,n)=0 for n<M<=15 and A(M,M)!=0; violations=" + std::to_string(bad)});
  }

  for (int m = 1; m <= 3; ++m) {
    const std::vector<double> k(static_cast<std::size_t>(m), 1.0);
    const double lo = lemma1_integral(k, 1e4).value();
    const double hi = lemma1_integral(k, 1e6).value();
    const double slope = (std::log(hi) - std::log(lo)) / (std::log(1e6) - std::log(1e4));
    out.push_back({"fading_integral_decay_m" + std::to_string(m), std::abs(slope + m) <= 0.1,
                   "slope=" + format_double(slope)});
  }

  {
    int bad = 0;
    const double values[] = {1.0, 2.0};
    for (Branch b : kAllBranches) {
      const NodeStatus st = status_of(b);
      for (double tp : values) {
        for (double tt : values) {
          for (double tr : values) {
            // Highest metric among eligible nodes, earlier node on ties.
            RelayIdentity expect = RelayIdentity::Primary;
            double best = tp;
            if (st.t_success && tt > best) {
              expect = RelayIdentity::SecondaryTx;
              best = tt;
            }
            if (st.r_success && tr > best) {
              expect = RelayIdentity::SecondaryRx;
            }
            bad += ocsa_select_relay(tp, tt, tr, st) != expect;
          }
        }
      }
    }
    out.push_back({"relay_tie_break", bad == 0, "32 status/metric patterns; mismatches=" + std::to_string(bad)});
  }

  {
    const ProtocolConfig cfg = ProtocolConfig::with_split(100.0, 0.5, 2);
    double worst = 0.0;
    const ChannelSet cases[] = {{0.01, 0.02, 0.5}, {1.0, 0.003, 2.0}, {0.2, 0.2, 0.2}};
    for (const ChannelSet& ch : cases) {
      const MultiuserChannelSet mch(1, {ch.g_pt, ch.g_pr}, {0.0, ch.g_tr, ch.g_tr, 0.0});
      const TrialOutcome csa = csa_conditional_miss(cfg, ch, 0.5);
      worst = std::max(worst, std::abs(mucsa_conditional_miss(cfg, mch, 0).value() - csa.p_miss_t.value()));
      worst = std::max(worst, std::abs(mucsa_conditional_miss(cfg, mch, 1).value() - csa.p_miss_r.value()));
    }
    out.push_back({"mucsa_single_pair", worst <= 1e-12, "max |MU-CSA(M=1) - CSA(half power)|=" + format_double(worst)});
  }

  out.push_back({"gaussian_q_origin", gaussian_q(0.0).value() == 0.5, "Q(0)=" + format_double(gaussian_q(0.0).value())});
  return out;
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beacon-assisted cooperative spectrum access experiments", "coopbeacon"};
  std::string kind;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string format;
  int threads = 0;
  app.add_option("kind", kind, "Experiment kind")->required()->check(CLI::IsMember(experiment_kinds()));
  app.add_option("--config", config_path, "Configuration file")->required();
  app.add_option("--set", overrides, "Override a config key, e.g. --set sweep.n_trials=1000");
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  }

  ExperimentConfig cfg;
  try {
    KeyValueConfig kv = KeyValueConfig::load(config_path);
    for (const std::string& o : overrides) {
      kv.apply_override(o);
    }
    cfg = ExperimentConfig::from_kv(kv);
    if (!out_path.empty()) {
      cfg.output_path = out_path;
    }
    if (!format.empty()) {
      cfg.format = table_format_from_string(format);
    }
    cfg.threads = threads;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::kNumeric;
  }

  try {
    const Table table = run_experiment(kind, cfg, err);
    std::map<std::string, std::string> meta = cfg.to_kv();
    // The destination is not part of the run plan; echoing it would make
    // identical runs written to different files differ.
    meta.erase("output.path");
    meta["experiment"] = kind;
    emit_table(table, meta, cfg.format, cfg.output_path, out);
    if (kind == "selfcheck") {
      for (const auto& row : table.rows) {
        if (std::get<std::string>(row[1]) != "pass") {
          return exit_code::kNumeric;
        }
      }
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::kIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kNumeric;
  }
  return exit_code::kOk;
}

}  // namespace coopbeacon
