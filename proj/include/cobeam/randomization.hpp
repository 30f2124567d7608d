// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Gaussian randomization recovery of rank-one beamformers from a relaxed
// covariance solution: candidates are drawn as w_g ~ CN(0, W_g), rescaled by
// a power-minimizing LP (network-wide, or per BS under fixed interference
// caps), and the cheapest feasible candidate wins.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "cobeam/conic.hpp"
#include "cobeam/model.hpp"
#include "cobeam/rng.hpp"
#include "cobeam/types.hpp"

namespace cobeam {

struct RandomizationOptions {
  int num_candidates = 100;
  std::uint64_t seed = 0x636f6265616dULL;
  Real feasibility_tol = 1e-6;
};

/// Outcome of one recovery attempt: scaled beams, per-group power
/// multipliers applied to the raw candidate, and the achieved objective.
struct CandidateOutcome {
  bool feasible = false;
  BeamformerSet beams;
  std::vector<Real> powers;  // multiplier per group on the raw candidate
  Real objective = std::numeric_limits<Real>::infinity();
  int candidate_index = -1;  // -1 marks the deterministic fallback candidate
};

/// Interference-cap view for one BS: the summed incoming allowance per
/// served user (enters the SINR right-hand side) and the outgoing cap per
/// out-of-cell user.
struct BsCapView {
  std::map<int, Real> incoming_sum;  // served user -> sum of others' caps
  std::map<int, Real> outgoing;      // out-of-cell user -> cap
};

namespace detail {

/// One candidate vector from CN(0, W): factor W = F F^H through its
/// eigendecomposition (negative eigenvalues are solver noise, clipped at
/// zero) and return F z with z standard complex normal.
inline CVector draw_group_candidate(const CMatrix& W, RngStream& rng) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (W + W.adjoint()));
  RVector d = es.eigenvalues().cwiseMax(0.0);
  const CMatrix F = es.eigenvectors() * d.cwiseSqrt().asDiagonal();
  return F * rng.complex_normal_vector(static_cast<int>(W.rows()));
}

/// Principal component of W scaled to the full trace power; used as a
/// deterministic fallback candidate when every random draw fails.
inline CVector principal_candidate(const CMatrix& W) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (W + W.adjoint()));
  const Eigen::Index top = W.rows() - 1;
  const Real lam = std::max(es.eigenvalues()(top), 0.0);
  return std::sqrt(lam) * es.eigenvectors().col(top);
}

}  // namespace detail

/// Draws one full candidate set, one group after another from the given
/// stream.
inline BeamformerSet draw_candidate(const CovarianceSet& Wstar,
                                    RngStream& rng) {
  BeamformerSet cand;
  cand.w.reserve(Wstar.W.size());
  for (const auto& W : Wstar.W)
    cand.w.push_back(detail::draw_group_candidate(W, rng));
  return cand;
}

/// Network-wide power rescaling of a fixed candidate set: minimize the total
/// transmit power subject to every user's SINR target, with the candidate
/// directions frozen. Internally the LP runs over powers along the
/// unit-normalized directions (so its objective is the true total power);
/// the returned solution is mapped back to multipliers on the raw
/// candidates, making a fed-back exact solution come out as all-ones.
inline LpSolution power_opt_centralized(const BeamformerSet& cand,
                                        const ChannelSet& ch,
                                        const SystemConfig& cfg,
                                        Real tol = 1e-8) {
  const int G = cfg.num_groups;
  std::vector<Real> norm2(G);
  std::vector<CVector> unit(G);
  for (int g = 0; g < G; ++g) {
    norm2[g] = cand.w[g].squaredNorm();
    unit[g] = norm2[g] > 0 ? CVector(cand.w[g] / std::sqrt(norm2[g]))
                           : CVector(CVector::Zero(cand.w[g].size()));
  }

  LpProblem lp;
  lp.num_vars = G;
  for (int u = 0; u < cfg.num_users; ++u) {
    const int g = cfg.user_group[u];
    const Real gamma = cfg.sinr_target[u];
    LpConstraint con;
    con.sense = Sense::GreaterEqual;
    con.rhs = gamma * cfg.noise_var[u];
    for (int k = 0; k < G; ++k) {
      const int owner = cfg.group_owner[k];
      const Real gain = std::norm(ch.h[owner][u].dot(unit[k]));
      con.terms.push_back({k, k == g ? gain : -gamma * gain});
    }
    lp.constraints.push_back(std::move(con));
  }

  LpSolution sol = solve_lp(lp, tol);
  if (solve_ok(sol.status)) {
    for (int g = 0; g < G; ++g)
      sol.p(g) = norm2[g] > 0 ? sol.p(g) / norm2[g] : 0.0;
  }
  return sol;
}

/// Per-BS power rescaling under fixed interference caps: same SINR rows as
/// the network-wide LP but restricted to this BS's groups, with the summed
/// incoming allowance added to the SINR right-hand side and one cap row per
/// out-of-cell user. Needs no information from other BSs.
inline LpSolution power_opt_distributed(const BeamformerSet& local_cand,
                                        const std::vector<int>& local_groups,
                                        const BsCapView& caps,
                                        const LocalChannels& local,
                                        const SystemConfig& cfg,
                                        Real tol = 1e-8) {
  const int nloc = static_cast<int>(local_groups.size());
  std::vector<Real> norm2(nloc);
  std::vector<CVector> unit(nloc);
  for (int i = 0; i < nloc; ++i) {
    norm2[i] = local_cand.w[i].squaredNorm();
    unit[i] = norm2[i] > 0 ? CVector(local_cand.w[i] / std::sqrt(norm2[i]))
                           : CVector(CVector::Zero(local_cand.w[i].size()));
  }

  LpProblem lp;
  lp.num_vars = nloc;
  for (const auto& [u, incoming] : caps.incoming_sum) {
    const int g = cfg.user_group[u];
    const Real gamma = cfg.sinr_target[u];
    LpConstraint con;
    con.sense = Sense::GreaterEqual;
    con.rhs = gamma * (cfg.noise_var[u] + incoming);
    for (int i = 0; i < nloc; ++i) {
      const Real gain = std::norm(local.h[u].dot(unit[i]));
      con.terms.push_back({i, local_groups[i] == g ? gain : -gamma * gain});
    }
    lp.constraints.push_back(std::move(con));
  }
  for (const auto& [u, cap] : caps.outgoing) {
    LpConstraint con;
    con.sense = Sense::LessEqual;
    con.rhs = cap;
    for (int i = 0; i < nloc; ++i)
      con.terms.push_back({i, std::norm(local.h[u].dot(unit[i]))});
    lp.constraints.push_back(std::move(con));
  }

  LpSolution sol = solve_lp(lp, tol);
  if (solve_ok(sol.status)) {
    for (int i = 0; i < nloc; ++i)
      sol.p(i) = norm2[i] > 0 ? sol.p(i) / norm2[i] : 0.0;
  }
  return sol;
}

/// Applies per-group power multipliers to a candidate set.
inline BeamformerSet scale_candidate(const BeamformerSet& cand,
                                     const std::vector<Real>& p) {
  BeamformerSet out;
  out.w.reserve(cand.w.size());
  for (std::size_t g = 0; g < cand.w.size(); ++g)
    out.w.push_back(std::sqrt(std::max(p[g], 0.0)) * cand.w[g]);
  return out;
}

namespace detail {

/// Evaluates one centralized candidate: LP rescaling plus a full SINR
/// re-validation against the model.
inline CandidateOutcome evaluate_centralized_candidate(
    const BeamformerSet& cand, const ChannelSet& ch, const SystemConfig& cfg,
    Real feasibility_tol, int index) {
  CandidateOutcome out;
  out.candidate_index = index;
  const LpSolution lp = power_opt_centralized(cand, ch, cfg);
  if (!solve_ok(lp.status)) return out;
  std::vector<Real> p(lp.p.data(), lp.p.data() + lp.p.size());
  BeamformerSet scaled = scale_candidate(cand, p);
  for (int u = 0; u < cfg.num_users; ++u) {
    const Real sinr = evaluate_sinr(ch, scaled, cfg, u);
    if (sinr < cfg.sinr_target[u] * (1.0 - feasibility_tol)) return out;
  }
  out.feasible = true;
  out.powers = std::move(p);
  out.objective = sum_power(scaled);
  out.beams = std::move(scaled);
  return out;
}

}  // namespace detail

/// Best-of-N Gaussian randomization for the network-wide problem. Candidate
/// n is drawn from substreams keyed by (seed, n, group), so the stream is
/// split per candidate and results do not depend on evaluation order. Ties
/// break toward the lowest candidate index. If every random candidate fails
/// the LP, a deterministic principal-component candidate is tried before
/// giving up.
inline CandidateOutcome randomize_centralized(const CovarianceSet& Wstar,
                                              const ChannelSet& ch,
                                              const SystemConfig& cfg,
                                              const RandomizationOptions& opts) {
  const int G = cfg.num_groups;
  CandidateOutcome best;
  for (int n = 0; n < opts.num_candidates; ++n) {
    BeamformerSet cand;
    cand.w.reserve(G);
    for (int g = 0; g < G; ++g) {
      RngStream rng(mix_seed(opts.seed, 0xca11d1d8ULL, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(g)));
      cand.w.push_back(detail::draw_group_candidate(Wstar.W[g], rng));
    }
    CandidateOutcome out = detail::evaluate_centralized_candidate(
        cand, ch, cfg, opts.feasibility_tol, n);
    if (out.feasible && out.objective < best.objective) best = std::move(out);
  }
  if (!best.feasible) {
    BeamformerSet cand;
    for (int g = 0; g < G; ++g)
      cand.w.push_back(detail::principal_candidate(Wstar.W[g]));
    best = detail::evaluate_centralized_candidate(cand, ch, cfg,
                                                  opts.feasibility_tol, -1);
  }
  if (!best.feasible)
    throw RandomizationExhausted(
        "randomization: no feasible candidate after " +
        std::to_string(opts.num_candidates) + " draws and fallback");
  return best;
}

/// Result of the synchronized distributed randomization. `bs_powers(n, b)`
/// is the per-BS power of candidate n (-1 marks a locally infeasible
/// candidate); these are exactly the scalars each BS would report so that
/// all BSs can agree on the winning index. The fallback candidate, when
/// used, is reported with candidate_index -1 and is absent from bs_powers.
struct DistributedRandomization {
  BeamformerSet beams;                    // indexed by global group id
  Real objective = std::numeric_limits<Real>::infinity();
  int candidate_index = -1;
  RMatrix bs_powers;                      // num_candidates x num_bs
};

namespace detail {

/// Scales one BS's candidate under its caps; returns the local power or -1.
inline Real rescale_bs_candidate(BeamformerSet& local_cand,
                                 const std::vector<int>& local_groups,
                                 const BsCapView& caps,
                                 const LocalChannels& local,
                                 const SystemConfig& cfg) {
  const LpSolution lp =
      power_opt_distributed(local_cand, local_groups, caps, local, cfg);
  if (!solve_ok(lp.status)) return -1.0;
  std::vector<Real> p(lp.p.data(), lp.p.data() + lp.p.size());
  local_cand = scale_candidate(local_cand, p);
  return sum_power(local_cand);
}

}  // namespace detail

/// Best-of-N randomization for the distributed problem: every BS draws its
/// candidate n from substreams keyed by (seed, n, group) — the same split as
/// the centralized recovery — rescales it locally under its interference
/// caps, and the index minimizing the summed per-BS powers wins (ties break
/// toward the lowest index). A candidate is discarded whenever any BS finds
/// it locally infeasible. If all N fail, each BS falls back to its
/// deterministic principal-component candidate.
inline DistributedRandomization randomize_distributed(
    const std::vector<CovarianceSet>& W_per_bs,
    const std::vector<LocalChannels>& locals,
    const std::vector<BsCapView>& caps, const SystemConfig& cfg,
    const RandomizationOptions& opts) {
  const int B = cfg.num_bs;
  std::vector<std::vector<int>> local_groups(B);
  for (int b = 0; b < B; ++b) local_groups[b] = cfg.groups_of(b);

  DistributedRandomization result;
  result.bs_powers = RMatrix::Constant(opts.num_candidates, B, -1.0);
  std::vector<BeamformerSet> best_per_bs;
  Real best_total = std::numeric_limits<Real>::infinity();

  auto try_candidate = [&](const std::vector<BeamformerSet>& raw, int n) {
    std::vector<BeamformerSet> scaled = raw;
    Real total = 0.0;
    bool ok = true;
    for (int b = 0; b < B; ++b) {
      const Real pb = detail::rescale_bs_candidate(scaled[b], local_groups[b],
                                                   caps[b], locals[b], cfg);
      if (n >= 0) result.bs_powers(n, b) = pb;
      if (pb < 0) ok = false;
      total += std::max(pb, 0.0);
    }
    if (ok && total < best_total) {
      best_total = total;
      best_per_bs = std::move(scaled);
      result.candidate_index = n;
    }
  };

  for (int n = 0; n < opts.num_candidates; ++n) {
    std::vector<BeamformerSet> raw(B);
    for (int b = 0; b < B; ++b) {
      for (std::size_t i = 0; i < local_groups[b].size(); ++i) {
        const int g = local_groups[b][i];
        RngStream rng(mix_seed(opts.seed, 0xca11d1d8ULL,
                               static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(g)));
        raw[b].w.push_back(
            detail::draw_group_candidate(W_per_bs[b].W[i], rng));
      }
    }
    try_candidate(raw, n);
  }
  if (best_per_bs.empty()) {
    std::vector<BeamformerSet> raw(B);
    for (int b = 0; b < B; ++b)
      for (std::size_t i = 0; i < local_groups[b].size(); ++i)
        raw[b].w.push_back(detail::principal_candidate(W_per_bs[b].W[i]));
    try_candidate(raw, -1);
  }
  if (best_per_bs.empty())
    throw RandomizationExhausted(
        "randomization: no candidate feasible at every BS after " +
        std::to_string(opts.num_candidates) + " draws and fallback");

  result.objective = best_total;
  result.beams.w.assign(cfg.num_groups, CVector());
  for (int b = 0; b < B; ++b)
    for (std::size_t i = 0; i < local_groups[b].size(); ++i)
      result.beams.w[local_groups[b][i]] = best_per_bs[b].w[i];
  return result;
}

}  // namespace cobeam
