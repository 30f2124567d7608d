// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
#include <catch2/catch_amalgamated.hpp>

#include "cobeam/model.hpp"

using namespace cobeam;

namespace {

/// Straightforward SINR implementation used as an oracle: plain loops and
/// scalar accumulation, no shared code with the library routine.
Real sinr_oracle(const ChannelSet& ch, const BeamformerSet& beams,
                 const SystemConfig& cfg, int u) {
  const int g = cfg.user_group[u];
  const int b = cfg.group_owner[g];
  std::complex<double> num_gain = 0;
  for (int a = 0; a < cfg.num_antennas; ++a)
    num_gain += std::conj(ch.h[b][u](a)) * beams.w[g](a);
  double denom = cfg.noise_var[u];
  for (int k = 0; k < cfg.num_groups; ++k) {
    if (k == g) continue;
    const int j = cfg.group_owner[k];
    std::complex<double> gain = 0;
    for (int a = 0; a < cfg.num_antennas; ++a)
      gain += std::conj(ch.h[j][u](a)) * beams.w[k](a);
    denom += std::norm(gain);
  }
  return std::norm(num_gain) / denom;
}

}  // namespace

TEST_CASE("config: uniform layout partitions groups and users evenly") {
  const SystemConfig cfg = make_uniform_config(2, 4, 8, 8, 1.0);
  REQUIRE(cfg.group_owner == std::vector<int>{0, 0, 1, 1});
  REQUIRE(cfg.user_group == std::vector<int>{0, 0, 1, 1, 2, 2, 3, 3});
  REQUIRE(cfg.groups_of(0) == std::vector<int>{0, 1});
  REQUIRE(cfg.users_of_bs(1) == std::vector<int>{4, 5, 6, 7});
  REQUIRE(cfg.serving_bs(5) == 1);
  REQUIRE(cfg.serves(1, 5));
  REQUIRE_FALSE(cfg.serves(0, 5));
}

TEST_CASE("config: validation rejects broken structures") {
  SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  SECTION("owner out of range") {
    cfg.group_owner[0] = 5;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SECTION("nonpositive target") {
    cfg.sinr_target[2] = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SECTION("nonpositive noise") {
    cfg.noise_var[0] = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SECTION("size mismatch") {
    cfg.user_group.pop_back();
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}

TEST_CASE("channels: deterministic per seed, distinct across seeds") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 6, 1.0);
  const ChannelSet a = generate_channels(cfg, 17);
  const ChannelSet b = generate_channels(cfg, 17);
  for (int bs = 0; bs < cfg.num_bs; ++bs)
    for (int u = 0; u < cfg.num_users; ++u)
      REQUIRE(a.h[bs][u] == b.h[bs][u]);

  const ChannelSet c = generate_channels(cfg, 18);
  bool any_diff = false;
  for (int bs = 0; bs < cfg.num_bs; ++bs)
    for (int u = 0; u < cfg.num_users; ++u)
      any_diff |= (a.h[bs][u] != c.h[bs][u]);
  REQUIRE(any_diff);
}

TEST_CASE("channels: unit variance and uncorrelated antenna entries") {
  // 1e5 independent draws of a 2-antenna channel; checks the marginal
  // variance of each entry and the cross-correlation between entries.
  SystemConfig cfg = make_uniform_config(1, 1, 100000, 2, 1.0);
  const ChannelSet ch = generate_channels(cfg, 2024);
  const int n = cfg.num_users;
  double var_acc = 0;
  Complex cross_acc = 0;
  for (int u = 0; u < n; ++u) {
    var_acc += std::norm(ch.h[0][u](0)) + std::norm(ch.h[0][u](1));
    cross_acc += ch.h[0][u](0) * std::conj(ch.h[0][u](1));
  }
  const double var = var_acc / (2.0 * n);
  REQUIRE(std::abs(var - 1.0) < 0.02);
  REQUIRE(std::abs(cross_acc) / n < 0.02);
}

TEST_CASE("sinr: single group with known gain and noise") {
  SystemConfig cfg = make_uniform_config(1, 1, 1, 2, 1.0, 2.0);
  ChannelSet ch;
  ch.h = {{CVector(2)}};
  ch.h[0][0] << Complex(1, 0), Complex(0, 0);
  BeamformerSet beams;
  beams.w = {CVector(2)};
  beams.w[0] << Complex(2, 0), Complex(0, 0);  // |h^H w|^2 = 4, sigma^2 = 2
  REQUIRE(evaluate_sinr(ch, beams, cfg, 0) == Catch::Approx(2.0).margin(1e-15));
}

TEST_CASE("sinr: zero beamformers give zero") {
  const SystemConfig cfg = make_uniform_config(2, 2, 4, 4, 1.0);
  const ChannelSet ch = generate_channels(cfg, 5);
  BeamformerSet beams;
  beams.w.assign(cfg.num_groups, CVector::Zero(cfg.num_antennas));
  for (int u = 0; u < cfg.num_users; ++u)
    REQUIRE(evaluate_sinr(ch, beams, cfg, u) == 0.0);
}

TEST_CASE("sinr: orthogonal cross-channel removes interference") {
  SystemConfig cfg = make_uniform_config(2, 2, 2, 2, 1.0);
  ChannelSet ch;
  ch.h.assign(2, std::vector<CVector>(2, CVector::Zero(2)));
  ch.h[0][0] << Complex(1, 0), Complex(0, 0);  // serving link of user 0
  ch.h[1][0] << Complex(0, 0), Complex(1, 0);  // cross link, orthogonal to w1
  ch.h[1][1] << Complex(1, 0), Complex(0, 0);
  ch.h[0][1] << Complex(0, 0), Complex(1, 0);
  BeamformerSet beams;
  beams.w = {CVector(2), CVector(2)};
  beams.w[0] << Complex(3, 0), Complex(0, 0);
  beams.w[1] << Complex(5, 0), Complex(0, 0);
  // Cross beam w1 arrives over h[1][0] = e2, orthogonal to w1 = 5 e1.
  REQUIRE(evaluate_sinr(ch, beams, cfg, 0) == Catch::Approx(9.0).margin(1e-12));
}

TEST_CASE("sinr: matches an independent reimplementation on random inputs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SystemConfig cfg = make_uniform_config(2, 4, 8, 5, 2.5, 1.5);
    const ChannelSet ch = generate_channels(cfg, seed);
    RngStream rng(mix_seed(seed, 99));
    BeamformerSet beams;
    for (int g = 0; g < cfg.num_groups; ++g)
      beams.w.push_back(rng.complex_normal_vector(cfg.num_antennas));
    for (int u = 0; u < cfg.num_users; ++u) {
      const Real lib = evaluate_sinr(ch, beams, cfg, u);
      const Real ref = sinr_oracle(ch, beams, cfg, u);
      REQUIRE(lib == Catch::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("power: beamformer and covariance accounting") {
  BeamformerSet beams;
  beams.w = {CVector(2), CVector(2)};
  beams.w[0] << Complex(1, 0), Complex(1, 0);
  beams.w[1] << Complex(0, 0), Complex(2, 0);
  REQUIRE(sum_power(beams) == Catch::Approx(6.0));

  BeamformerSet zero;
  zero.w = {CVector::Zero(3)};
  REQUIRE(sum_power(zero) == 0.0);

  // Rank-one outer products carry the same power as the beamformers.
  RngStream rng(8);
  BeamformerSet rnd;
  CovarianceSet cov;
  for (int g = 0; g < 3; ++g) {
    rnd.w.push_back(rng.complex_normal_vector(4));
    cov.W.push_back(rnd.w.back() * rnd.w.back().adjoint());
  }
  REQUIRE(sum_power(cov) == Catch::Approx(sum_power(rnd)).epsilon(1e-12));
}

TEST_CASE("db conversions") {
  REQUIRE(db_to_linear(0.0) == Catch::Approx(1.0));
  REQUIRE(db_to_linear(10.0) == Catch::Approx(10.0));
  REQUIRE(db_to_linear(20.0) == Catch::Approx(100.0));
  REQUIRE(linear_to_db(db_to_linear(7.3)) == Catch::Approx(7.3).epsilon(1e-12));
}
