// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Public conic-solver interface: semidefinite programs with Hermitian PSD
// block variables under linear trace inequalities, and linear programs over
// the nonnegative orthant. Both minimize the plain sum of the variables
// (sum of traces / sum of entries), which is the only objective the
// beamforming problems need. Inequalities are converted to equalities with
// orthant slacks; reported duals are sign-adjusted per constraint sense so
// they are nonnegative at optimality regardless of sense.
#pragma once

#include <utility>
#include <vector>

#include "cobeam/detail/hsd_ipm.hpp"
#include "cobeam/types.hpp"

namespace cobeam {

enum class Sense { GreaterEqual, LessEqual };

enum class SolveStatus {
  Optimal,
  OptimalLowAccuracy,  // best iterate meets the acceptable (1e-6) score only
  Infeasible,
  DualInfeasible,
  NumericalFailure,
};

/// True when the solution carries a usable primal/dual pair.
inline bool solve_ok(SolveStatus st) {
  return st == SolveStatus::Optimal || st == SolveStatus::OptimalLowAccuracy;
}

/// One linear constraint  sum_g Tr(C_g W_g)  (sense)  rhs, with Hermitian
/// coefficient blocks addressed by block index.
struct SdpConstraint {
  std::vector<std::pair<int, CMatrix>> blocks;
  Sense sense = Sense::GreaterEqual;
  Real rhs = 0.0;
};

/// minimize sum_g Tr(W_g)  s.t.  the given trace inequalities, W_g PSD.
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<SdpConstraint> constraints;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<CMatrix> W;
  Real objective = 0.0;
  std::vector<Real> dual;  // per constraint, sense-adjusted (>= -1e-9)
  Real gap = 0.0;
  Real primal_residual = 0.0;
  Real dual_residual = 0.0;
  int iterations = 0;
};

/// One linear constraint  sum_j a_j p_j  (sense)  rhs  on orthant variables.
struct LpConstraint {
  std::vector<std::pair<int, Real>> terms;
  Sense sense = Sense::GreaterEqual;
  Real rhs = 0.0;
};

/// minimize sum_j p_j  s.t.  the given inequalities, p >= 0.
struct LpProblem {
  int num_vars = 0;
  std::vector<LpConstraint> constraints;
};

struct LpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVector p;
  Real objective = 0.0;
  std::vector<Real> dual;
  Real gap = 0.0;
  int iterations = 0;
};

namespace detail {

inline SolveStatus map_status(IpmStatus st) {
  switch (st) {
    case IpmStatus::Optimal:
      return SolveStatus::Optimal;
    case IpmStatus::OptimalLowAccuracy:
      return SolveStatus::OptimalLowAccuracy;
    case IpmStatus::Infeasible:
      return SolveStatus::Infeasible;
    case IpmStatus::DualInfeasible:
      return SolveStatus::DualInfeasible;
    default:
      return SolveStatus::NumericalFailure;
  }
}

}  // namespace detail

inline SdpSolution solve_sdp(const SdpProblem& prob, Real tol = 1e-8) {
  const int nblocks = static_cast<int>(prob.block_dims.size());
  const int m = static_cast<int>(prob.constraints.size());

  detail::Cone cone;
  cone.psd_dims = prob.block_dims;
  cone.nlin = m;  // one slack per inequality

  std::vector<detail::ConeVec> rows;
  rows.reserve(m);
  RVector b(m);
  for (int i = 0; i < m; ++i) {
    const auto& con = prob.constraints[i];
    detail::ConeVec row = detail::ConeVec::zero(cone);
    for (const auto& [blk, C] : con.blocks) {
      if (blk < 0 || blk >= nblocks)
        throw std::invalid_argument("sdp: constraint block index out of range");
      if (C.rows() != prob.block_dims[blk] || C.cols() != prob.block_dims[blk])
        throw std::invalid_argument("sdp: coefficient dimension mismatch");
      const Real dev = (C - C.adjoint()).norm();
      if (dev > 1e-9 * (1.0 + C.norm()))
        throw std::invalid_argument("sdp: coefficient matrix not Hermitian");
      row.mats[blk] += 0.5 * (C + C.adjoint());
    }
    // ">=" rows subtract a slack, "<=" rows add one.
    row.lin(i) = con.sense == Sense::GreaterEqual ? -1.0 : 1.0;
    b(i) = con.rhs;
    rows.push_back(std::move(row));
  }

  detail::ConeVec c = detail::ConeVec::zero(cone);
  for (int g = 0; g < nblocks; ++g)
    c.mats[g] = CMatrix::Identity(prob.block_dims[g], prob.block_dims[g]);

  detail::IpmOptions opts;
  opts.tol = tol;
  detail::HsdIpm ipm(cone, std::move(rows), std::move(b), std::move(c));
  const detail::IpmResult res = ipm.solve(opts);

  SdpSolution sol;
  sol.status = detail::map_status(res.status);
  sol.iterations = res.iterations;
  sol.gap = res.relative_gap;
  sol.primal_residual = res.primal_residual;
  sol.dual_residual = res.dual_residual;
  if (solve_ok(sol.status)) {
    sol.W = res.x.mats;
    sol.objective = res.objective;
    sol.dual.resize(m);
    for (int i = 0; i < m; ++i) {
      const Real y = res.y(i);
      sol.dual[i] = prob.constraints[i].sense == Sense::GreaterEqual ? y : -y;
    }
  }
  return sol;
}

inline LpSolution solve_lp(const LpProblem& prob, Real tol = 1e-8) {
  const int n = prob.num_vars;
  const int m = static_cast<int>(prob.constraints.size());

  detail::Cone cone;
  cone.nlin = n + m;  // variables then one slack per inequality

  std::vector<detail::ConeVec> rows;
  rows.reserve(m);
  RVector b(m);
  for (int i = 0; i < m; ++i) {
    const auto& con = prob.constraints[i];
    detail::ConeVec row = detail::ConeVec::zero(cone);
    for (const auto& [j, a] : con.terms) {
      if (j < 0 || j >= n)
        throw std::invalid_argument("lp: variable index out of range");
      row.lin(j) += a;
    }
    row.lin(n + i) = con.sense == Sense::GreaterEqual ? -1.0 : 1.0;
    b(i) = con.rhs;
    rows.push_back(std::move(row));
  }

  detail::ConeVec c = detail::ConeVec::zero(cone);
  for (int j = 0; j < n; ++j) c.lin(j) = 1.0;

  detail::IpmOptions opts;
  opts.tol = tol;
  detail::HsdIpm ipm(cone, std::move(rows), std::move(b), std::move(c));
  const detail::IpmResult res = ipm.solve(opts);

  LpSolution sol;
  sol.status = detail::map_status(res.status);
  sol.iterations = res.iterations;
  sol.gap = res.relative_gap;
  if (solve_ok(sol.status)) {
    sol.p = res.x.lin.head(n);
    sol.objective = res.objective;
    sol.dual.resize(m);
    for (int i = 0; i < m; ++i) {
      const Real y = res.y(i);
      sol.dual[i] = prob.constraints[i].sense == Sense::GreaterEqual ? y : -y;
    }
  }
  return sol;
}

}  // namespace cobeam
