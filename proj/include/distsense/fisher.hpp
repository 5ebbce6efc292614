#pragma once

// Quantum and classical Fisher information for multimode phase estimation,
// support-aware pseudo-inversion, and the weighted Cramer-Rao bound.
//
// Phase encoding is exp(-i phi_k N_k) per mode throughout, so the quantum
// Fisher information matrix depends only on the probe state.

#include "distsense/core.hpp"
#include "distsense/gaussian.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace distsense {

enum class FisherKind { quantum, classical };

class FisherMatrix {
 public:
  FisherMatrix(Mat h, FisherKind kind) : h_(std::move(h)), kind_(kind) {
    if (h_.rows() != h_.cols() || h_.rows() == 0) {
      throw std::invalid_argument("FisherMatrix: must be square");
    }
    if ((h_ - h_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("FisherMatrix: not symmetric");
    }
    h_ = ((h_ + h_.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(h_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < -1e-9 * std::max(hi, 1e-300)) {
      throw std::invalid_argument("FisherMatrix: not positive semidefinite");
    }
  }

  int size() const { return static_cast<int>(h_.rows()); }
  const Mat& matrix() const { return h_; }
  FisherKind kind() const { return kind_; }

 private:
  Mat h_;
  FisherKind kind_;
};

// QFIM of a pure Gaussian probe:
//   H_ij = 2 Tr[G^(i,j) G^(j,i)] - delta_ij
//          + (O2 d^(i))^T [G^-1]^(i,j) (O2 d^(j))
// with G^(i,j) the 2x2 mode block of the covariance, d^(i) the mode's first
// moments and O2 the single-mode symplectic form. The displacement term uses
// blocks of the full 2M x 2M inverse, from one shared factorization.
inline FisherMatrix qfim_pure(const GaussianState& probe) {
  if (!probe.is_pure()) {
    throw UnsupportedInputError("qfim_pure: probe must be pure");
  }
  const int m = probe.n_modes();
  const bool displaced = !probe.is_zero_mean();
  Mat gamma_inv;
  if (displaced) {
    Eigen::LLT<Mat> llt(probe.gamma());
    if (llt.info() != Eigen::Success) {
      throw NumericalFailureError("qfim_pure: singular covariance");
    }
    gamma_inv = llt.solve(Mat::Identity(2 * m, 2 * m));
  }
  Eigen::Matrix2d omega2;
  omega2 << 0.0, 1.0, -1.0, 0.0;
  Mat h = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector2d rdi =
        displaced ? (omega2 * probe.d().segment<2>(2 * i)).eval()
                  : Eigen::Vector2d::Zero().eval();
    for (int j = i; j < m; ++j) {
      double v = 2.0 * (probe.mode_block(i, j) * probe.mode_block(j, i))
                           .trace();
      if (i == j) {
        v -= 1.0;
      }
      if (displaced) {
        const Eigen::Vector2d rdj = omega2 * probe.d().segment<2>(2 * j);
        v += rdi.dot(gamma_inv.block<2, 2>(2 * i, 2 * j) * rdj);
      }
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return FisherMatrix(std::move(h), FisherKind::quantum);
}

// Directional QFI from the fidelity drop under a small phase step:
// 8 (1 - |<psi(0)|psi(eps * u)>|) / eps^2 = u^T H u + O(eps^2).
inline double qfi_finite_difference_oracle(const GaussianState& probe,
                                           const Vec& direction,
                                           double epsilon) {
  if (direction.size() != probe.n_modes()) {
    throw std::invalid_argument("qfi oracle: direction length mismatch");
  }
  if (!(epsilon >= 1e-5 && epsilon <= 1e-2)) {
    throw std::invalid_argument("qfi oracle: epsilon outside [1e-5, 1e-2]");
  }
  GaussianState shifted = probe;
  for (int k = 0; k < probe.n_modes(); ++k) {
    if (direction[k] != 0.0) {
      shifted = apply_symplectic(
          shifted,
          phase_shifter(epsilon * direction[k], k, probe.n_modes()));
    }
  }
  const double f = pure_state_overlap(probe, shifted);
  return 8.0 * (1.0 - f) / (epsilon * epsilon);
}

struct PseudoInverse {
  Mat pinv;
  Mat support_projector;
  int rank = 0;
};

// Eigenvalues below tol * lambda_max are treated as exact zeros; the inverse
// acts on the remaining support only.
inline PseudoInverse pinv_on_support(const FisherMatrix& m,
                                     double tol = 1e-10) {
  const int n = m.size();
  Eigen::SelfAdjointEigenSolver<Mat> es(m.matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalFailureError("pinv_on_support: eigendecomposition failed");
  }
  const Vec& lam = es.eigenvalues();
  const Mat& v = es.eigenvectors();
  const double lam_max = lam.maxCoeff();
  PseudoInverse out;
  out.pinv = Mat::Zero(n, n);
  out.support_projector = Mat::Zero(n, n);
  if (lam_max <= 0.0) {
    return out;  // all-zero matrix: empty support
  }
  const double cut = tol * lam_max;
  for (int k = 0; k < n; ++k) {
    if (lam[k] > cut) {
      out.pinv += v.col(k) * v.col(k).transpose() / lam[k];
      out.support_projector += v.col(k) * v.col(k).transpose();
      ++out.rank;
    }
  }
  return out;
}

// Weighted Cramer-Rao bound w^T M^+ w for the normalized weights. The
// weights must lie in the support of M, otherwise the combination is not
// estimable and the out-of-support residual is reported.
inline double qcrb(const FisherMatrix& m, const WeightVector& w) {
  if (w.size() != m.size()) {
    throw std::invalid_argument("qcrb: weight length mismatch");
  }
  const PseudoInverse p = pinv_on_support(m);
  const Vec& wn = w.normalized();
  const double residual = (wn - p.support_projector * wn).norm();
  if (residual > 1e-8) {
    throw NotEstimableError("qcrb: weights outside the Fisher support",
                            residual);
  }
  return wn.dot(p.pinv * wn);
}

// Classical FIM of a zero-mean multivariate normal outcome model:
// F_ij = Tr[C^-1 dC_i C^-1 dC_j] / 2.
inline FisherMatrix gaussian_cfim(const Mat& cov,
                                  const std::vector<Mat>& dcov) {
  const int m = static_cast<int>(dcov.size());
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailureError("gaussian_cfim: covariance not positive "
                                "definite");
  }
  std::vector<Mat> a(dcov.size());
  for (int i = 0; i < m; ++i) {
    if (dcov[static_cast<std::size_t>(i)].rows() != cov.rows() ||
        dcov[static_cast<std::size_t>(i)].cols() != cov.cols()) {
      throw std::invalid_argument("gaussian_cfim: derivative size mismatch");
    }
    a[static_cast<std::size_t>(i)] =
        llt.solve(dcov[static_cast<std::size_t>(i)]);
  }
  Mat f = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double v = 0.5 * (a[static_cast<std::size_t>(i)] *
                              a[static_cast<std::size_t>(j)])
                                 .trace();
      f(i, j) = v;
      f(j, i) = v;
    }
  }
  return FisherMatrix(std::move(f), FisherKind::classical);
}

// Covariance of per-mode homodyne outcomes. The homodyne angle a_k is
// referenced against the accumulated mode phase: the measured marginal is
// the x quadrature after an effective rotation by e_k = phi_k - a_k, so
// tracking the phase with the angle keeps the statistics fixed.
inline Mat homodyne_covariance(const GaussianState& probe, const Vec& phases,
                               const Vec& angles) {
  const int m = probe.n_modes();
  if (phases.size() != m || angles.size() != m) {
    throw std::invalid_argument("homodyne_covariance: length mismatch");
  }
  Mat rows(m, 2);
  for (int k = 0; k < m; ++k) {
    const double e = phases[k] - angles[k];
    rows(k, 0) = std::cos(e);
    rows(k, 1) = std::sin(e);
  }
  Mat cov(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double v = rows.row(i) * probe.mode_block(i, j) *
                       rows.row(j).transpose();
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

// Analytic d/d(phi_k) of the homodyne covariance, at fixed angles.
inline std::vector<Mat> homodyne_covariance_derivatives(
    const GaussianState& probe, const Vec& phases, const Vec& angles) {
  const int m = probe.n_modes();
  if (phases.size() != m || angles.size() != m) {
    throw std::invalid_argument(
        "homodyne_covariance_derivatives: length mismatch");
  }
  Mat rows(m, 2), drows(m, 2);
  for (int k = 0; k < m; ++k) {
    const double e = phases[k] - angles[k];
    rows(k, 0) = std::cos(e);
    rows(k, 1) = std::sin(e);
    drows(k, 0) = -std::sin(e);
    drows(k, 1) = std::cos(e);
  }
  std::vector<Mat> dcov(static_cast<std::size_t>(m),
                        Mat::Zero(m, m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Eigen::Matrix2d block = probe.mode_block(i, j);
      const double left = drows.row(i) * block * rows.row(j).transpose();
      dcov[static_cast<std::size_t>(i)](i, j) += left;
      dcov[static_cast<std::size_t>(i)](j, i) += left;
    }
  }
  return dcov;
}

// CFIM of homodyne detection on a zero-displacement probe. Displacement
// schemes are rejected: the outcome mean would carry information outside
// the zero-mean model.
inline FisherMatrix homodyne_cfim(const GaussianState& probe,
                                  const Vec& phases, const Vec& angles) {
  if (!probe.is_zero_mean()) {
    throw UnsupportedInputError(
        "homodyne_cfim: probe carries displacement; the zero-mean outcome "
        "model does not apply");
  }
  return gaussian_cfim(homodyne_covariance(probe, phases, angles),
                       homodyne_covariance_derivatives(probe, phases, angles));
}

// Closed-form homodyne CFIM for one squeezed vacuum distributed over a
// one-sign group: F_ij = alpha w_i w_j + beta w_i delta_ij with
//   alpha = tanh^2(2r) (8 sinh^4 r + 6 sinh^2 r + 1)
//   beta  = tanh^2(2r) cosh(2r)
// and alpha + beta = 8 Nbar (Nbar + 1) for Nbar = sinh^2 r.
inline FisherMatrix homodyne_cfim_closed_form(const WeightVector& w,
                                              double r) {
  if (!w.single_sign()) {
    throw std::invalid_argument(
        "homodyne_cfim_closed_form: weights must share one sign");
  }
  const Vec mags = w.normalized().cwiseAbs();
  const double s2 = std::sinh(r) * std::sinh(r);
  const double t2 = std::tanh(2.0 * r) * std::tanh(2.0 * r);
  const double alpha = t2 * (8.0 * s2 * s2 + 6.0 * s2 + 1.0);
  const double beta = t2 * std::cosh(2.0 * r);
  const int m = w.size();
  Mat f = alpha * (mags * mags.transpose());
  for (int i = 0; i < m; ++i) {
    f(i, i) += beta * mags[i];
  }
  return FisherMatrix(std::move(f), FisherKind::classical);
}

// Sherman-Morrison value of w^T F^-1 w for the closed-form CFIM above:
// ||w||_1^2 / (8 Nbar (Nbar + 1)). For a normalized WeightVector the L1
// norm is 1; group slices scale by their share of the mass.
inline double homodyne_closed_form_bound(double group_l1, double r) {
  const double s2 = std::sinh(r) * std::sinh(r);
  return group_l1 * group_l1 / (8.0 * s2 * (s2 + 1.0));
}

}  // namespace distsense
