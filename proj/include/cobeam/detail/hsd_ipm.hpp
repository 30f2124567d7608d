// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
//
// Homogeneous self-dual interior-point method for conic programs over a
// product of complex Hermitian PSD blocks and a nonnegative orthant:
//
//   minimize <c, x>  subject to  <a_i, x> = b_i (i = 1..m),  x in K.
//
// Nesterov-Todd scaling with a Mehrotra predictor-corrector, a dense Schur
// complement factored once per iteration, and one round of direction-level
// iterative refinement (re-solving the Newton system against its own exact
// residual). The embedding makes infeasibility detectable through the
// (tau, kappa) homogenization variables.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "cobeam/types.hpp"

namespace cobeam::detail {

/// Cartesian product of Hermitian PSD cones (one per block dimension) and a
/// nonnegative orthant of dimension nlin.
struct Cone {
  std::vector<int> psd_dims;
  int nlin = 0;

  int degree() const {
    int d = nlin;
    for (int k : psd_dims) d += k;
    return d;
  }
};

/// Element of the cone's ambient space: one Hermitian matrix per PSD block
/// plus a real vector for the orthant part.
struct ConeVec {
  std::vector<CMatrix> mats;
  RVector lin;

  static ConeVec zero(const Cone& cone) {
    ConeVec v;
    v.mats.reserve(cone.psd_dims.size());
    for (int d : cone.psd_dims) v.mats.push_back(CMatrix::Zero(d, d));
    v.lin = RVector::Zero(cone.nlin);
    return v;
  }

  static ConeVec identity(const Cone& cone) {
    ConeVec v;
    v.mats.reserve(cone.psd_dims.size());
    for (int d : cone.psd_dims) v.mats.push_back(CMatrix::Identity(d, d));
    v.lin = RVector::Ones(cone.nlin);
    return v;
  }

  void axpy(Real a, const ConeVec& o) {
    for (std::size_t i = 0; i < mats.size(); ++i) mats[i] += a * o.mats[i];
    lin += a * o.lin;
  }

  /// Real inner product: sum of Frobenius inner products plus the orthant
  /// dot product. Hermitian blocks make the imaginary part vanish.
  Real dot(const ConeVec& o) const {
    Real acc = lin.dot(o.lin);
    for (std::size_t i = 0; i < mats.size(); ++i)
      acc += ((mats[i].array().conjugate() * o.mats[i].array()).sum()).real();
    return acc;
  }

  void scale(Real a) {
    for (auto& m : mats) m *= a;
    lin *= a;
  }

  Real norm() const { return std::sqrt(std::max(0.0, dot(*this))); }
};

/// Eigenvalue-clamped Cholesky-like factor L with L L^H ~= X. Clamping at
/// lambda_max * eps keeps the factor invertible when X is barely PSD.
inline CMatrix safe_factor(const CMatrix& X) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (X + X.adjoint()));
  RVector d = es.eigenvalues();  // ascending
  const Real floor_val = std::max(d(d.size() - 1), 1e-300) * 2.3e-16;
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::max(d(i), floor_val);
  return es.eigenvectors() * d.cwiseSqrt().asDiagonal();
}

enum class IpmStatus {
  Optimal,
  OptimalLowAccuracy,
  Infeasible,
  DualInfeasible,
  NumericallyFailed,
};

struct IpmResult {
  IpmStatus status = IpmStatus::NumericallyFailed;
  ConeVec x;
  RVector y;
  ConeVec s;
  Real objective = 0.0;
  int iterations = 0;
  Real primal_residual = std::numeric_limits<Real>::infinity();
  Real dual_residual = std::numeric_limits<Real>::infinity();
  Real relative_gap = std::numeric_limits<Real>::infinity();
};

struct IpmOptions {
  Real tol = 1e-8;         // target accuracy for "Optimal"
  Real acceptable = 1e-6;  // fallback accuracy for "OptimalLowAccuracy"
  int max_iterations = 100;
  int stall_iterations = 15;  // bail after this many non-improving iterates
};

class HsdIpm {
 public:
  HsdIpm(const Cone& cone, std::vector<ConeVec> constraints, RVector b,
         ConeVec c)
      : cone_(cone),
        constraints_(std::move(constraints)),
        b_(std::move(b)),
        c_(std::move(c)),
        m_(static_cast<int>(constraints_.size())),
        nblocks_(static_cast<int>(cone.psd_dims.size())) {}

  IpmResult solve(const IpmOptions& opts = {}) {
    ConeVec x = ConeVec::identity(cone_);
    ConeVec s = ConeVec::identity(cone_);
    RVector y = RVector::Zero(m_);
    Real tau = 1.0, kappa = 1.0;
    const Real nu = static_cast<Real>(cone_.degree() + 1);
    const Real bnorm = 1.0 + b_.norm();
    const Real cnorm = 1.0 + c_.norm();

    // Best-scoring iterate seen so far; returned if full accuracy is never
    // reached (near-degenerate instances commonly stall around 1e-7).
    Real best_score = std::numeric_limits<Real>::infinity();
    ConeVec best_x = x;
    ConeVec best_s = s;
    RVector best_y = y;
    Real best_tau = tau, best_pres = 0, best_dres = 0, best_gap = 0;
    int best_iter = 0;

    for (int it = 0; it < opts.max_iterations; ++it) {
      // Residuals of the homogeneous embedding at the current iterate.
      RVector rp = apply_A(x) - b_ * tau;
      ConeVec aty = apply_At(y);
      ConeVec rd = ConeVec::zero(cone_);
      rd.axpy(-1.0, aty);
      rd.axpy(tau, c_);
      rd.axpy(-1.0, s);
      const Real rg = b_.dot(y) - c_.dot(x) - kappa;
      const Real mu = (x.dot(s) + tau * kappa) / nu;

      const Real pres = rp.norm() / tau / bnorm;
      const Real dres = rd.norm() / tau / cnorm;
      const Real cx = c_.dot(x) / tau;
      const Real by = b_.dot(y) / tau;
      const Real relgap = (x.dot(s) / (tau * tau)) / (1.0 + std::abs(cx) + std::abs(by));
      const Real score = std::max({pres, dres, relgap});
      if (score < best_score) {
        best_score = score;
        best_x = x;
        best_s = s;
        best_y = y;
        best_tau = tau;
        best_pres = pres;
        best_dres = dres;
        best_gap = relgap;
        best_iter = it;
      }
      if (it - best_iter >= opts.stall_iterations) break;  // no progress

      if (pres < opts.tol && dres < opts.tol && relgap < opts.tol) {
        IpmResult res;
        res.status = IpmStatus::Optimal;
        res.x = x;
        res.s = s;
        res.x.scale(1.0 / tau);
        res.s.scale(1.0 / tau);
        res.y = y / tau;
        res.objective = c_.dot(res.x);
        res.iterations = it;
        res.primal_residual = pres;
        res.dual_residual = dres;
        res.relative_gap = relgap;
        return res;
      }

      // Infeasibility certificates of the homogeneous model.
      if (b_.dot(y) > 0) {
        ConeVec cert = ConeVec::zero(cone_);
        cert.axpy(-1.0, aty);
        cert.axpy(-1.0, s);
        if (cert.norm() / b_.dot(y) < 1e-9 * cnorm) {
          IpmResult res;
          res.status = IpmStatus::Infeasible;
          res.y = y;
          res.x = x;
          res.s = s;
          res.iterations = it;
          return res;
        }
      }
      if (c_.dot(x) < 0 && apply_A(x).norm() / (-c_.dot(x)) < 1e-9 * bnorm) {
        IpmResult res;
        res.status = IpmStatus::DualInfeasible;
        res.x = x;
        res.s = s;
        res.y = y;
        res.iterations = it;
        return res;
      }

      // Nesterov-Todd scaling point per PSD block: R R^H = W with
      // W^-1 x W^-1 = s; lambda holds the scaled spectrum.
      Rs_.assign(nblocks_, CMatrix());
      Rinvs_.assign(nblocks_, CMatrix());
      Wfull_.assign(nblocks_, CMatrix());
      lams_.assign(nblocks_, RVector());
      for (int i = 0; i < nblocks_; ++i) {
        const CMatrix Lx = safe_factor(x.mats[i]);
        const CMatrix Ls = safe_factor(s.mats[i]);
        Eigen::JacobiSVD<CMatrix> svd(Ls.adjoint() * Lx,
                                      Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RVector sig = svd.singularValues();
        const CMatrix U = svd.matrixU();
        const CMatrix sqrt_sig = sig.cwiseSqrt().asDiagonal();
        const CMatrix inv_sqrt_sig = sig.cwiseSqrt().cwiseInverse().asDiagonal();
        Rs_[i] = Ls.adjoint().partialPivLu().solve(U) * sqrt_sig;
        Rinvs_[i] = inv_sqrt_sig * U.adjoint() * Ls.adjoint();
        Wfull_[i] = Rs_[i] * Rs_[i].adjoint();
        lams_[i] = sig;
      }
      w2_ = (x.lin.array() / s.lin.array()).matrix();
      lam_lin_ = (x.lin.array() * s.lin.array()).sqrt().matrix();

      // Schur complement M = A W A^T, factored once per iteration.
      WAis_.clear();
      WAis_.reserve(m_);
      for (const auto& ci : constraints_) WAis_.push_back(W_apply(ci));
      RMatrix M(m_, m_);
      for (int i = 0; i < m_; ++i)
        for (int j = i; j < m_; ++j) {
          const Real v = constraints_[j].dot(WAis_[i]);
          M(i, j) = v;
          M(j, i) = v;
        }
      const Real reg = M.trace() / m_ * 1e-15;
      M.diagonal().array() += reg;
      schur_ = M.ldlt();

      const ConeVec Wc = W_apply(c_);
      u1_ = schur_.solve(apply_A(Wc) + b_);
      ConeVec dx_u1 = apply_At(u1_);
      dx_u1.axpy(-1.0, c_);
      dx1_ = W_apply(dx_u1);
      denom_ = b_.dot(u1_) - c_.dot(dx1_) + kappa / tau;
      x_ = &x;
      s_ = &s;
      tau_ = tau;
      kappa_ = kappa;

      // Predictor (affine-scaling direction).
      std::vector<CMatrix> zero_dc(nblocks_);
      for (int i = 0; i < nblocks_; ++i)
        zero_dc[i] = CMatrix((-lams_[i].array().square()).matrix().cast<Complex>().asDiagonal());
      ConeVec nrd = ConeVec::zero(cone_);
      nrd.axpy(-1.0, rd);
      RVector neg_rp = -rp;
      RVector aff_lin = (-(lam_lin_.array().square())).matrix();
      KktDir da = solve_refined(neg_rp, nrd, -rg, zero_dc, aff_lin, -tau * kappa);
      const Real aaff = max_step(x, s, tau, kappa, da, 1.0);
      const Real mu_aff =
          ((x.dot(s) + aaff * (da.dx.dot(s) + x.dot(da.ds)) + aaff * aaff * da.dx.dot(da.ds)) +
           (tau + aaff * da.dtau) * (kappa + aaff * da.dkappa)) /
          nu;
      const Real sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

      // Corrector with second-order term from the affine direction.
      std::vector<CMatrix> dc(nblocks_);
      for (int i = 0; i < nblocks_; ++i) {
        const CMatrix dxb = Rinvs_[i] * da.dx.mats[i] * Rinvs_[i].adjoint();
        const CMatrix dsb = Rs_[i].adjoint() * da.ds.mats[i] * Rs_[i];
        const CMatrix P = 0.5 * (dxb * dsb + dsb * dxb);
        dc[i] = CMatrix((sigma * mu - lams_[i].array().square()).matrix().cast<Complex>().asDiagonal()) - P;
      }
      RVector dc_lin = (sigma * mu - lam_lin_.array().square() -
                        da.dx.lin.array() * da.ds.lin.array())
                           .matrix();
      const Real dc_tk = sigma * mu - tau * kappa - da.dtau * da.dkappa;
      KktDir dir = solve_refined(neg_rp, nrd, -rg, dc, dc_lin, dc_tk);

      const Real a = max_step(x, s, tau, kappa, dir, 0.99);
      x.axpy(a, dir.dx);
      s.axpy(a, dir.ds);
      y += a * dir.dy;
      tau += a * dir.dtau;
      kappa += a * dir.dkappa;
      // Re-symmetrize: the W-chain products drift the iterates slightly
      // non-Hermitian, which corrupts later eigendecompositions.
      for (auto& mblk : x.mats) mblk = 0.5 * (mblk + mblk.adjoint()).eval();
      for (auto& mblk : s.mats) mblk = 0.5 * (mblk + mblk.adjoint()).eval();
    }

    IpmResult res;
    best_x.scale(1.0 / best_tau);
    best_s.scale(1.0 / best_tau);
    res.x = best_x;
    res.s = best_s;
    res.y = best_y / best_tau;
    res.objective = c_.dot(best_x);
    res.iterations = best_iter;
    res.primal_residual = best_pres;
    res.dual_residual = best_dres;
    res.relative_gap = best_gap;
    if (best_pres < opts.tol && best_dres < opts.tol && best_gap < opts.tol)
      res.status = IpmStatus::Optimal;
    else if (best_score < opts.acceptable)
      res.status = IpmStatus::OptimalLowAccuracy;
    else
      res.status = IpmStatus::NumericallyFailed;
    return res;
  }

 private:
  struct KktDir {
    ConeVec dx, ds;
    RVector dy;
    Real dtau = 0.0, dkappa = 0.0;
  };

  RVector apply_A(const ConeVec& v) const {
    RVector out(m_);
    for (int i = 0; i < m_; ++i) out(i) = constraints_[i].dot(v);
    return out;
  }

  ConeVec apply_At(const RVector& yv) const {
    ConeVec out = ConeVec::zero(cone_);
    for (int i = 0; i < m_; ++i) out.axpy(yv(i), constraints_[i]);
    return out;
  }

  ConeVec W_apply(const ConeVec& v) const {
    ConeVec out = ConeVec::zero(cone_);
    for (int i = 0; i < nblocks_; ++i)
      out.mats[i] = Wfull_[i] * v.mats[i] * Wfull_[i];
    out.lin = (v.lin.array() * w2_.array()).matrix();
    return out;
  }

  /// Solves the linearized homogeneous system
  ///   A dx - b dtau                 = q1
  ///   -A^T dy + c dtau - ds         = q2
  ///   b^T dy - c^T dx - dkappa      = q3
  ///   lambda o (dx~ + ds~)          = dc      (scaled PSD blocks)
  ///   s o dx + x o ds               = dc_lin  (orthant)
  ///   tau dkappa + kappa dtau       = dc_tk
  /// by eliminating ds and dx against the Schur complement.
  KktDir solve_kkt(const RVector& q1, const ConeVec& q2, Real q3,
                   const std::vector<CMatrix>& dc, const RVector& dc_lin,
                   Real dc_tk) const {
    ConeVec gc = ConeVec::zero(cone_);
    for (int i = 0; i < nblocks_; ++i) {
      const RVector& lam = lams_[i];
      CMatrix G(lam.size(), lam.size());
      for (Eigen::Index r = 0; r < lam.size(); ++r)
        for (Eigen::Index col = 0; col < lam.size(); ++col)
          G(r, col) = 2.0 * dc[i](r, col) / (lam(r) + lam(col));
      gc.mats[i] = Rinvs_[i].adjoint() * G * Rinvs_[i];
    }
    gc.lin = (dc_lin.array() / x_->lin.array()).matrix();

    ConeVec t2 = gc;
    t2.axpy(1.0, q2);
    const ConeVec Wt2 = W_apply(t2);
    const RVector rhs2 = q1 - apply_A(Wt2);
    const RVector u2 = schur_.solve(rhs2);
    ConeVec dx_u2 = apply_At(u2);
    dx_u2.axpy(1.0, t2);
    const ConeVec dx0 = W_apply(dx_u2);

    const Real num = q3 - b_.dot(u2) + c_.dot(dx0) + dc_tk / tau_;
    const Real dtau = num / denom_;

    KktDir d;
    d.dy = u2 + dtau * u1_;
    d.dx = dx0;
    d.dx.axpy(dtau, dx1_);
    d.ds = ConeVec::zero(cone_);
    d.ds.axpy(-1.0, apply_At(d.dy));
    d.ds.axpy(dtau, c_);
    d.ds.axpy(-1.0, q2);
    d.dtau = dtau;
    d.dkappa = (dc_tk - kappa_ * dtau) / tau_;
    return d;
  }

  KktDir solve_refined(const RVector& q1, const ConeVec& q2, Real q3,
                       const std::vector<CMatrix>& dc, const RVector& dc_lin,
                       Real dc_tk) const {
    KktDir d = solve_kkt(q1, q2, q3, dc, dc_lin, dc_tk);

    // Exact residuals of the computed direction, fed back through one more
    // solve. This recovers roughly two digits near convergence.
    const RVector v1 = q1 - (apply_A(d.dx) - b_ * d.dtau);
    ConeVec t = ConeVec::zero(cone_);
    t.axpy(-1.0, apply_At(d.dy));
    t.axpy(d.dtau, c_);
    t.axpy(-1.0, d.ds);
    ConeVec v2 = ConeVec::zero(cone_);
    v2.axpy(1.0, q2);
    v2.axpy(-1.0, t);
    const Real v3 = q3 - (b_.dot(d.dy) - c_.dot(d.dx) - d.dkappa);
    std::vector<CMatrix> vc(nblocks_);
    for (int i = 0; i < nblocks_; ++i) {
      const CMatrix dxb = Rinvs_[i] * d.dx.mats[i] * Rinvs_[i].adjoint();
      const CMatrix dsb = Rs_[i].adjoint() * d.ds.mats[i] * Rs_[i];
      const CMatrix ssum = dxb + dsb;
      const RVector& lam = lams_[i];
      CMatrix lamo(lam.size(), lam.size());
      for (Eigen::Index r = 0; r < lam.size(); ++r)
        for (Eigen::Index col = 0; col < lam.size(); ++col)
          lamo(r, col) = 0.5 * (lam(r) + lam(col)) * ssum(r, col);
      vc[i] = dc[i] - lamo;
    }
    const RVector vlin = dc_lin - (x_->lin.array() * d.ds.lin.array() +
                                   s_->lin.array() * d.dx.lin.array())
                                      .matrix();
    const Real vtk = dc_tk - (tau_ * d.dkappa + kappa_ * d.dtau);

    const KktDir corr = solve_kkt(v1, v2, v3, vc, vlin, vtk);
    d.dx.axpy(1.0, corr.dx);
    d.dy += corr.dy;
    d.ds.axpy(1.0, corr.ds);
    d.dtau += corr.dtau;
    d.dkappa += corr.dkappa;
    return d;
  }

  Real max_step(const ConeVec& x, const ConeVec& s, Real tau, Real kappa,
                const KktDir& d, Real frac) const {
    Real amax = std::numeric_limits<Real>::infinity();
    auto psd_limit = [&](const CMatrix& X, const CMatrix& D) {
      const CMatrix L = safe_factor(X);
      Eigen::PartialPivLU<CMatrix> lu(L);
      const CMatrix inner = lu.solve(D);
      const CMatrix Mm = lu.solve(inner.adjoint()).adjoint();
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (Mm + Mm.adjoint()));
      const Real emin = es.eigenvalues()(0);
      if (emin < 0) amax = std::min(amax, -1.0 / emin);
    };
    for (int i = 0; i < nblocks_; ++i) {
      psd_limit(x.mats[i], d.dx.mats[i]);
      psd_limit(s.mats[i], d.ds.mats[i]);
    }
    auto lin_limit = [&](Real v, Real dv) {
      if (dv < 0) amax = std::min(amax, -v / dv);
    };
    for (Eigen::Index i = 0; i < x.lin.size(); ++i) {
      lin_limit(x.lin(i), d.dx.lin(i));
      lin_limit(s.lin(i), d.ds.lin(i));
    }
    lin_limit(tau, d.dtau);
    lin_limit(kappa, d.dkappa);
    return std::min(1.0, frac * amax);
  }

  Cone cone_;
  std::vector<ConeVec> constraints_;
  RVector b_;
  ConeVec c_;
  int m_;
  int nblocks_;

  // Per-iteration NT scaling state.
  std::vector<CMatrix> Rs_, Rinvs_, Wfull_;
  std::vector<RVector> lams_;
  RVector w2_, lam_lin_;
  std::vector<ConeVec> WAis_;
  Eigen::LDLT<RMatrix> schur_;
  RVector u1_;
  ConeVec dx1_;
  Real denom_ = 0.0;
  const ConeVec* x_ = nullptr;
  const ConeVec* s_ = nullptr;
  Real tau_ = 1.0, kappa_ = 1.0;
};

}  // namespace cobeam::detail
