// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cobeam/rng.hpp"
#include "cobeam/types.hpp"

namespace cobeam {

/// Network topology and QoS targets for a multi-cell multigroup multicast
/// downlink: B base stations, G multicast groups (each owned by exactly one
/// BS), U single-antenna users (each in exactly one group), A transmit
/// antennas per BS. SINR targets and noise variances are linear-scale and
/// per-user.
struct SystemConfig {
  int num_bs = 0;
  int num_groups = 0;
  int num_users = 0;
  int num_antennas = 0;
  std::vector<int> group_owner;   // group -> owning BS
  std::vector<int> user_group;    // user -> group
  std::vector<Real> sinr_target;  // per user, linear scale, > 0
  std::vector<Real> noise_var;    // per user, > 0

  int serving_bs(int u) const { return group_owner[user_group[u]]; }
  bool serves(int b, int u) const { return serving_bs(u) == b; }

  std::vector<int> groups_of(int b) const {
    std::vector<int> out;
    for (int g = 0; g < num_groups; ++g)
      if (group_owner[g] == b) out.push_back(g);
    return out;
  }

  std::vector<int> users_of_group(int g) const {
    std::vector<int> out;
    for (int u = 0; u < num_users; ++u)
      if (user_group[u] == g) out.push_back(u);
    return out;
  }

  std::vector<int> users_of_bs(int b) const {
    std::vector<int> out;
    for (int u = 0; u < num_users; ++u)
      if (serves(b, u)) out.push_back(u);
    return out;
  }

  /// Checks the structural invariants; throws std::invalid_argument on the
  /// first violation.
  void validate() const {
    if (num_bs <= 0 || num_groups <= 0 || num_users <= 0 || num_antennas <= 0)
      throw std::invalid_argument("config: all dimensions must be positive");
    if (static_cast<int>(group_owner.size()) != num_groups)
      throw std::invalid_argument("config: group_owner size mismatch");
    if (static_cast<int>(user_group.size()) != num_users)
      throw std::invalid_argument("config: user_group size mismatch");
    if (static_cast<int>(sinr_target.size()) != num_users)
      throw std::invalid_argument("config: sinr_target size mismatch");
    if (static_cast<int>(noise_var.size()) != num_users)
      throw std::invalid_argument("config: noise_var size mismatch");
    for (int g = 0; g < num_groups; ++g)
      if (group_owner[g] < 0 || group_owner[g] >= num_bs)
        throw std::invalid_argument("config: group owner out of range");
    for (int u = 0; u < num_users; ++u)
      if (user_group[u] < 0 || user_group[u] >= num_groups)
        throw std::invalid_argument("config: user group out of range");
    for (int u = 0; u < num_users; ++u) {
      if (!(sinr_target[u] > 0) || !std::isfinite(sinr_target[u]))
        throw std::invalid_argument("config: SINR targets must be positive");
      if (!(noise_var[u] > 0) || !std::isfinite(noise_var[u]))
        throw std::invalid_argument("config: noise variances must be positive");
    }
  }
};

/// Builds the standard symmetric layout: G/B groups per BS and U/G users per
/// group, with a common SINR target and unit noise. Group g is owned by BS
/// g*B/G and user u belongs to group u*G/U (block partition).
inline SystemConfig make_uniform_config(int B, int G, int U, int A,
                                        Real gamma_linear, Real noise = 1.0) {
  if (G % B != 0) throw std::invalid_argument("uniform config needs B | G");
  if (U % G != 0) throw std::invalid_argument("uniform config needs G | U");
  SystemConfig cfg;
  cfg.num_bs = B;
  cfg.num_groups = G;
  cfg.num_users = U;
  cfg.num_antennas = A;
  cfg.group_owner.resize(G);
  for (int g = 0; g < G; ++g) cfg.group_owner[g] = g * B / G;
  cfg.user_group.resize(U);
  for (int u = 0; u < U; ++u) cfg.user_group[u] = u * G / U;
  cfg.sinr_target.assign(U, gamma_linear);
  cfg.noise_var.assign(U, noise);
  cfg.validate();
  return cfg;
}

/// Channel vectors h[b][u] (length A) for every BS-user pair.
struct ChannelSet {
  std::vector<std::vector<CVector>> h;  // [B][U]
};

/// The channel rows a single BS can observe: h[u] = channel from this BS to
/// user u, for all users. Per-BS computations accept only this view, which
/// is what makes their locality checkable at the interface.
struct LocalChannels {
  int bs = 0;
  std::vector<CVector> h;  // [U]
};

inline LocalChannels local_view(const ChannelSet& ch, int b) {
  return LocalChannels{b, ch.h[b]};
}

/// One transmit beamformer per group (length A, complex).
struct BeamformerSet {
  std::vector<CVector> w;
};

/// One transmit covariance per group (A x A, Hermitian PSD).
struct CovarianceSet {
  std::vector<CMatrix> W;
};

/// Draws frequency-flat Rayleigh channels: every entry of every h[b][u] is
/// an independent CN(0, 1). Each (b, u) pair gets its own substream derived
/// from the seed, so the result is reproducible and independent of
/// evaluation order.
inline ChannelSet generate_channels(const SystemConfig& cfg,
                                    std::uint64_t seed) {
  ChannelSet ch;
  ch.h.resize(cfg.num_bs);
  for (int b = 0; b < cfg.num_bs; ++b) {
    ch.h[b].resize(cfg.num_users);
    for (int u = 0; u < cfg.num_users; ++u) {
      RngStream stream(mix_seed(seed, 0x6368616eULL, static_cast<std::uint64_t>(b),
                                static_cast<std::uint64_t>(u)));
      ch.h[b][u] = stream.complex_normal_vector(cfg.num_antennas);
    }
  }
  return ch;
}

/// Received SINR of user u under the given beamformers: desired power over
/// noise plus every other group's interference power, with each group's
/// signal arriving over the channel from its owning BS.
inline Real evaluate_sinr(const ChannelSet& ch, const BeamformerSet& beams,
                          const SystemConfig& cfg, int u) {
  const int g = cfg.user_group[u];
  Real desired = 0.0;
  Real interference = 0.0;
  for (int k = 0; k < cfg.num_groups; ++k) {
    const int owner = cfg.group_owner[k];
    const Complex gain = ch.h[owner][u].dot(beams.w[k]);  // h^H w
    const Real p = std::norm(gain);
    if (k == g)
      desired = p;
    else
      interference += p;
  }
  return desired / (cfg.noise_var[u] + interference);
}

/// Total transmit power of a beamformer set.
inline Real sum_power(const BeamformerSet& beams) {
  Real total = 0.0;
  for (const auto& w : beams.w) total += w.squaredNorm();
  return total;
}

/// Total transmit power of a covariance set (sum of traces).
inline Real sum_power(const CovarianceSet& cov) {
  Real total = 0.0;
  for (const auto& W : cov.W) total += W.trace().real();
  return total;
}

inline Real db_to_linear(Real x_db) { return std::pow(10.0, x_db / 10.0); }
inline Real linear_to_db(Real x) { return 10.0 * std::log10(x); }

}  // namespace cobeam
