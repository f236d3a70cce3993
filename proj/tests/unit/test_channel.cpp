#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "coopbeacon/channel.hpp"
#include "oracles.hpp"

using namespace coopbeacon;

TEST_CASE("LinkParams validation and resolution") {
  CHECK_THROWS_AS(LinkParams::direct(0.0), std::domain_error);
  CHECK_THROWS_AS(LinkParams::direct(-1.0), std::domain_error);
  CHECK(LinkParams::direct(2.5).lambda() == 2.5);
  CHECK(LinkParams::direct(2.5).is_direct());
  const LinkParams pl = LinkParams::pathloss(2.0, 10.0, 3.0);
  CHECK(!pl.is_direct());
  CHECK(pl.lambda() == doctest::Approx(2.0e-3).epsilon(1e-14));
  CHECK_THROWS_AS(LinkParams::pathloss(1.0, 0.0, 2.0), std::domain_error);
}

TEST_CASE("sample_channel_set is reproducible and has the right means") {
  const LinkTriple links = LinkTriple::direct(1.0, 2.0, 3.0);
  const ChannelSet a = sample_channel_set(links, CounterRng(77, 5));
  const ChannelSet b = sample_channel_set(links, CounterRng(77, 5));
  CHECK(a.g_pt == b.g_pt);
  CHECK(a.g_pr == b.g_pr);
  CHECK(a.g_tr == b.g_tr);
  const ChannelSet c = sample_channel_set(links, CounterRng(78, 5));
  CHECK(c.g_pt != a.g_pt);

  std::array<double, 3> mean{};
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const ChannelSet ch = sample_channel_set(links, CounterRng(3, static_cast<std::uint64_t>(i)));
    mean[0] += ch.g_pt;
    mean[1] += ch.g_pr;
    mean[2] += ch.g_tr;
  }
  CHECK(std::abs(mean[0] / n - 1.0) < 0.01);
  CHECK(std::abs(mean[1] / n - 2.0) < 0.02);
  CHECK(std::abs(mean[2] / n - 3.0) < 0.03);
}

TEST_CASE("gains follow the exponential law") {
  const double lambda = 2.0;
  const LinkTriple links = LinkTriple::direct(lambda, lambda, lambda);
  std::vector<double> xs;
  const int n = 1000000;
  xs.reserve(n);
  for (int i = 0; i < n; ++i) {
    xs.push_back(sample_channel_set(links, CounterRng(21, static_cast<std::uint64_t>(i))).g_pr);
  }
  CHECK(oracle::ks_statistic(xs, [&](double x) { return 1.0 - std::exp(-x / lambda); }) <= 0.002);
}

TEST_CASE("tiny lambda gives tiny gains") {
  const LinkTriple links = LinkTriple::direct(1e-12, 1e-12, 1e-12);
  for (std::uint64_t t = 0; t < 1000; ++t) {
    CHECK(sample_channel_set(links, CounterRng(1, t)).g_pt < 1e-9);
  }
}

TEST_CASE("weighted sampling is unbiased for gain moments") {
  const LinkTriple links = LinkTriple::direct(1.0, 1.0, 1.0);
  const GainProposal prop = GainProposal::deep_fade(100.0);
  double w_mean = 0.0;
  double g_mean = 0.0;
  double tail = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const WeightedChannelSet s = sample_channel_set(links, prop, CounterRng(8, static_cast<std::uint64_t>(i)));
    w_mean += s.weight;
    g_mean += s.weight * s.channels.g_pt;
    tail += s.weight * (s.channels.g_pt < 0.01 ? 1.0 : 0.0);
  }
  CHECK(std::abs(w_mean / n - 1.0) < 0.02);
  CHECK(std::abs(g_mean / n - 1.0) < 0.02);
  CHECK(std::abs(tail / n - (1.0 - std::exp(-0.01))) < 0.02 * 0.01);
}

TEST_CASE("plain proposal has unit weight and matches plain sampling") {
  const LinkTriple links = LinkTriple::direct(1.0, 2.0, 3.0);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const WeightedChannelSet w = sample_channel_set(links, GainProposal::plain(), CounterRng(4, t));
    const ChannelSet p = sample_channel_set(links, CounterRng(4, t));
    CHECK(w.weight == 1.0);
    CHECK(w.channels.g_pt == p.g_pt);
    CHECK(w.channels.g_tr == p.g_tr);
  }
}

TEST_CASE("instantaneous_snr") {
  CHECK(instantaneous_snr(10.0, 0.0) == 0.0);
  CHECK(instantaneous_snr(10.0, 2.5) == 25.0);
  const LinkTriple links = LinkTriple::direct(2.0, 2.0, 2.0);
  double s = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    s += instantaneous_snr(10.0, sample_channel_set(links, CounterRng(6, static_cast<std::uint64_t>(i))).g_pt);
  }
  CHECK(std::abs(s / n - 20.0) < 0.2);
}

TEST_CASE("relay_metrics") {
  const MetricTriple m = relay_metrics({1.0, 2.0, 3.0});
  CHECK(m.t_p == 3.0);
  CHECK(m.t_t == 4.0);
  CHECK(m.t_r == 5.0);
  const MetricTriple z = relay_metrics({});
  CHECK((z.t_p == 0.0 && z.t_t == 0.0 && z.t_r == 0.0));
  const MetricTriple s = relay_metrics({0.7, 0.7, 1.3});
  CHECK(s.t_t == s.t_r);
}

TEST_CASE("relay_metrics are exact sums for random channels") {
  const LinkTriple links = LinkTriple::direct(1.0, 2.0, 3.0);
  for (std::uint64_t t = 0; t < 10000; ++t) {
    const ChannelSet ch = sample_channel_set(links, CounterRng(2, t));
    const MetricTriple m = relay_metrics(ch);
    CHECK(m.t_p == ch.g_pt + ch.g_pr);
    CHECK(m.t_t == ch.g_pt + ch.g_tr);
    CHECK(m.t_r == ch.g_pr + ch.g_tr);
  }
}

TEST_CASE("perturb_metrics") {
  const MetricTriple m{1.0, 2.0, 3.0};
  const NoisyMetricTriple exact = perturb_metrics(m, 0.0, CounterRng(1, 0));
  CHECK(exact.tilde_t_p == 1.0);
  CHECK(exact.tilde_t_t == 2.0);
  CHECK(exact.tilde_t_r == 3.0);
  CHECK_THROWS_AS(perturb_metrics(m, -0.1, CounterRng(1, 0)), std::domain_error);

  std::array<double, 3> s{};
  std::array<double, 3> s2{};
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const NoisyMetricTriple nm = perturb_metrics(m, 1.0, CounterRng(12, static_cast<std::uint64_t>(i)));
    const std::array<double, 3> e{nm.tilde_t_p - 1.0, nm.tilde_t_t - 2.0, nm.tilde_t_r - 3.0};
    for (int k = 0; k < 3; ++k) {
      s[k] += e[k];
      s2[k] += e[k] * e[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = s[k] / n;
    CHECK(std::abs(s2[k] / n - mean * mean - 1.0) < 0.01);
  }
}

TEST_CASE("large noise on equal metrics gives uniform orderings") {
  const MetricTriple m{1.0, 1.0, 1.0};
  std::map<int, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const NoisyMetricTriple nm = perturb_metrics(m, 100.0, CounterRng(13, static_cast<std::uint64_t>(i)));
    std::array<int, 3> idx{0, 1, 2};
    const std::array<double, 3> v{nm.tilde_t_p, nm.tilde_t_t, nm.tilde_t_r};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    ++counts[idx[0] * 9 + idx[1] * 3 + idx[2]];
  }
  CHECK(counts.size() == 6);
  for (const auto& [_, c] : counts) {
    CHECK(std::abs(c - n / 6.0) < 5.0 * std::sqrt(n / 6.0));
  }
}

TEST_CASE("multiuser channel layout") {
  const MultiuserLinks links = MultiuserLinks::uniform(3, 1.0);
  const MultiuserChannelSet mch = sample_multiuser(links, CounterRng(5, 9));
  CHECK(mch.pairs() == 3);
  CHECK(mch.users() == 6);
  CHECK(MultiuserChannelSet::transmitter(2) == 2);
  CHECK(mch.receiver(2) == 5);
  for (int a = 0; a < 6; ++a) {
    CHECK(mch.mutual(a, a) == 0.0);
    for (int b = 0; b < 6; ++b) {
      CHECK(mch.mutual(a, b) == mch.mutual(b, a));
    }
  }
  const ChannelSet ch = mch.pair_channels(1);
  CHECK(ch.g_pt == mch.primary(1));
  CHECK(ch.g_pr == mch.primary(4));
  CHECK(ch.g_tr == mch.mutual(1, 4));
  CHECK_THROWS_AS(MultiuserLinks::uniform(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(MultiuserLinks::uniform(2, 0.0), std::domain_error);
}

TEST_CASE("single-pair multiuser draw matches ChannelSet semantics") {
  const MultiuserLinks links = MultiuserLinks::uniform(1, 1.0);
  double s_mu = 0.0;
  double s_ch = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto mch = sample_multiuser(links, CounterRng(14, static_cast<std::uint64_t>(i)));
    s_mu += mch.pair_channels(0).g_tr;
    s_ch += sample_channel_set(LinkTriple::direct(1.0, 1.0, 1.0), CounterRng(15, static_cast<std::uint64_t>(i))).g_tr;
  }
  CHECK(std::abs(s_mu / n - 1.0) < 0.01);
  CHECK(std::abs(s_ch / n - 1.0) < 0.01);
}

TEST_CASE("five-pair network entries have unit mean") {
  const MultiuserLinks links = MultiuserLinks::uniform(5, 1.0);
  std::vector<double> prim(10, 0.0);
  std::vector<double> mut(100, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto mch = sample_multiuser(links, CounterRng(16, static_cast<std::uint64_t>(i)));
    for (int a = 0; a < 10; ++a) {
      prim[static_cast<std::size_t>(a)] += mch.primary(a);
      for (int b = 0; b < 10; ++b) {
        mut[static_cast<std::size_t>(a * 10 + b)] += mch.mutual(a, b);
      }
    }
  }
  for (int a = 0; a < 10; ++a) {
    CHECK(std::abs(prim[static_cast<std::size_t>(a)] / n - 1.0) < 0.02);
    for (int b = 0; b < 10; ++b) {
      if (a != b) {
        CHECK(std::abs(mut[static_cast<std::size_t>(a * 10 + b)] / n - 1.0) < 0.02);
      }
    }
  }
}
