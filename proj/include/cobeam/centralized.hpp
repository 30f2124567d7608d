// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Centralized coordinated beamforming: the network-wide power-minimization
// problem is relaxed to an SDP over per-group covariance matrices, solved,
// and rank-one beamformers are recovered either exactly (eigendecomposition
// when every block is rank one) or by Gaussian randomization.
#pragma once

#include <string>
#include <vector>

#include "cobeam/conic.hpp"
#include "cobeam/model.hpp"
#include "cobeam/randomization.hpp"
#include "cobeam/types.hpp"

namespace cobeam {

/// Assembles the relaxed network-wide problem: one A x A PSD block per
/// group, objective sum of traces, and one SINR constraint per user u
/// (served by BS b, group g):
///
///   Tr(H_{b,u} W_g) - gamma_u * sum_{k != g} Tr(H_{owner(k),u} W_k)
///     >= gamma_u * sigma_u^2,      H_{j,u} = h_{j,u} h_{j,u}^H.
///
/// Each user sees its serving BS's channel on its own group and the owning
/// BS's channel on every interfering group.
inline SdpProblem build_centralized_sdp(const ChannelSet& ch,
                                        const SystemConfig& cfg) {
  SdpProblem prob;
  prob.block_dims.assign(cfg.num_groups, cfg.num_antennas);
  for (int u = 0; u < cfg.num_users; ++u) {
    const int g = cfg.user_group[u];
    const Real gamma = cfg.sinr_target[u];
    SdpConstraint con;
    con.sense = Sense::GreaterEqual;
    con.rhs = gamma * cfg.noise_var[u];
    for (int k = 0; k < cfg.num_groups; ++k) {
      const CVector& h = ch.h[cfg.group_owner[k]][u];
      const CMatrix H = h * h.adjoint();
      con.blocks.push_back({k, k == g ? H : CMatrix(-gamma * H)});
    }
    prob.constraints.push_back(std::move(con));
  }
  return prob;
}

/// Numerical rank of a Hermitian PSD matrix: the number of eigenvalues
/// strictly above eps times the largest one (zero matrix -> 0). Computed on
/// the symmetrized input so solver asymmetry noise cannot inflate it.
inline int check_rank(const CMatrix& W, Real eps = 1e-4) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (W + W.adjoint()),
                                            Eigen::EigenvaluesOnly);
  const RVector& d = es.eigenvalues();
  const Real lam_max = d(d.size() - 1);
  return static_cast<int>((d.array() > eps * lam_max).count());
}

/// Recovers w with W = w w^H from a (numerically) rank-one PSD matrix:
/// sqrt(lambda_max) times the principal eigenvector, with the global phase
/// fixed so the first entry of non-negligible magnitude is real positive.
/// Rejects inputs that are not rank one at the given threshold.
inline CVector extract_rank_one(const CMatrix& W, Real eps = 1e-4) {
  if (check_rank(W, eps) != 1)
    throw std::invalid_argument(
        "extract_rank_one: matrix is not rank one at eps=" +
        std::to_string(eps));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (W + W.adjoint()));
  const Eigen::Index top = W.rows() - 1;
  CVector w = std::sqrt(es.eigenvalues()(top)) * es.eigenvectors().col(top);
  const Real big = w.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > 1e-12 * big) {
      w *= std::conj(w(i)) / std::abs(w(i));
      break;
    }
  }
  return w;
}

struct CentralizedResult {
  CovarianceSet cov;            // relaxed optimum, one block per group
  Real lower_bound = 0.0;       // relaxed objective (sum of traces)
  BeamformerSet beams;          // recovered rank-one solution
  Real achieved_power = 0.0;    // sum of ||w_g||^2
  std::vector<int> group_rank;  // numerical rank per covariance block
  bool all_rank_one = false;
  bool randomized = false;      // true when recovery went through candidates
  int candidate_index = -1;     // winning candidate when randomized
  SolveStatus status = SolveStatus::Optimal;
};

namespace detail {

/// Re-validates recovered beams against the model and, only if some target
/// is missed beyond tol, re-runs the power LP along the recovered directions
/// to restore feasibility without changing them.
inline void polish_if_violated(BeamformerSet& beams, const ChannelSet& ch,
                               const SystemConfig& cfg, Real tol) {
  bool violated = false;
  for (int u = 0; u < cfg.num_users; ++u) {
    if (evaluate_sinr(ch, beams, cfg, u) < cfg.sinr_target[u] * (1.0 - tol)) {
      violated = true;
      break;
    }
  }
  if (!violated) return;
  const LpSolution lp = power_opt_centralized(beams, ch, cfg);
  if (!solve_ok(lp.status))
    throw NumericalError("centralized: post-recovery power fix infeasible");
  std::vector<Real> p(lp.p.data(), lp.p.data() + lp.p.size());
  beams = scale_candidate(beams, p);
}

}  // namespace detail

/// Solves the network-wide problem end to end: SDP relaxation, rank check
/// at eps_rank, then either direct eigen-recovery (all blocks rank one; the
/// relaxation is tight and the recovered beams attain the lower bound) or
/// Gaussian randomization. Throws InfeasibleError when the targets are
/// jointly unattainable and NumericalError when the solver fails.
inline CentralizedResult solve_centralized(
    const ChannelSet& ch, const SystemConfig& cfg,
    const RandomizationOptions& opts = {}, Real eps_rank = 1e-4,
    Real sdp_tol = 1e-8) {
  SdpSolution sol = solve_sdp(build_centralized_sdp(ch, cfg), sdp_tol);
  if (sol.status == SolveStatus::Infeasible)
    throw InfeasibleError("centralized: SINR targets jointly unattainable");
  if (!solve_ok(sol.status))
    throw NumericalError("centralized: SDP solve failed");

  CentralizedResult res;
  res.status = sol.status;
  res.cov.W = std::move(sol.W);
  res.lower_bound = sol.objective;
  res.group_rank.reserve(cfg.num_groups);
  for (const auto& W : res.cov.W) res.group_rank.push_back(check_rank(W, eps_rank));
  res.all_rank_one = true;
  for (int r : res.group_rank) res.all_rank_one = res.all_rank_one && r == 1;

  if (res.all_rank_one) {
    res.beams.w.reserve(cfg.num_groups);
    for (const auto& W : res.cov.W) res.beams.w.push_back(extract_rank_one(W, eps_rank));
    detail::polish_if_violated(res.beams, ch, cfg, opts.feasibility_tol);
  } else {
    CandidateOutcome out = randomize_centralized(res.cov, ch, cfg, opts);
    res.beams = std::move(out.beams);
    res.randomized = true;
    res.candidate_index = out.candidate_index;
  }
  res.achieved_power = sum_power(res.beams);
  return res;
}

}  // namespace cobeam
