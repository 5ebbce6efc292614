#pragma once

// Multimode Gaussian states in covariance-matrix form and the symplectic
// gate algebra (phase shifters, beam splitters, squeezers, weight-matched
// beam-splitter networks).
//
// Conventions, fixed once and used everywhere:
//   * quadrature ordering is interleaved: Q = (x1, p1, ..., xM, pM)
//   * vacuum covariance is (1/2) * identity
//   * displacement alpha enters the first moments as d = sqrt(2) (Re a, Im a),
//     so a coherent state carries exactly |alpha|^2 photons
//   * a gate's symplectic S updates moments as d -> S d, Gamma -> S Gamma S^T

#include "distsense/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace distsense {

class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(Mat s, double tol = 1e-10) : s_(std::move(s)) {
    if (s_.rows() != s_.cols() || s_.rows() % 2 != 0 || s_.rows() == 0) {
      throw std::invalid_argument("SymplecticMatrix: matrix must be 2M x 2M");
    }
    const Mat omega = symplectic_form(n_modes());
    const double err =
        (s_ * omega * s_.transpose() - omega).cwiseAbs().maxCoeff();
    if (err > tol) {
      throw std::invalid_argument(
          "SymplecticMatrix: S Omega S^T != Omega (error " +
          std::to_string(err) + ")");
    }
  }

  int n_modes() const { return static_cast<int>(s_.rows()) / 2; }
  const Mat& matrix() const { return s_; }

  static SymplecticMatrix identity(int n_modes) {
    return SymplecticMatrix(Mat::Identity(2 * n_modes, 2 * n_modes));
  }

  // Composition in application order: (b * a) applies a first, then b.
  friend SymplecticMatrix operator*(const SymplecticMatrix& b,
                                    const SymplecticMatrix& a) {
    return SymplecticMatrix(b.s_ * a.s_);
  }

  SymplecticMatrix inverse() const {
    const Mat omega = symplectic_form(n_modes());
    // S^-1 = -Omega S^T Omega for symplectic S.
    return SymplecticMatrix(-omega * s_.transpose() * omega);
  }

 private:
  Mat s_;
};

class GaussianState {
 public:
  GaussianState(Mat gamma, Vec d) : gamma_(std::move(gamma)), d_(std::move(d)) {
    if (gamma_.rows() != gamma_.cols() || gamma_.rows() % 2 != 0 ||
        gamma_.rows() == 0 || d_.size() != gamma_.rows()) {
      throw std::invalid_argument("GaussianState: inconsistent dimensions");
    }
    if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument("GaussianState: covariance not symmetric");
    }
    gamma_ = ((gamma_ + gamma_.transpose()) / 2.0).eval();
    check_uncertainty();
  }

  int n_modes() const { return static_cast<int>(gamma_.rows()) / 2; }
  const Mat& gamma() const { return gamma_; }
  const Vec& d() const { return d_; }

  Eigen::Block<const Mat, 2, 2> mode_block(int i, int j) const {
    return gamma_.block<2, 2>(2 * i, 2 * j);
  }

  bool is_pure(double tol = 1e-8) const {
    const double det2g = (2.0 * gamma_).determinant();
    return std::abs(det2g - 1.0) <= tol * std::max(1.0, std::abs(det2g));
  }

  bool is_zero_mean(double tol = 1e-12) const {
    return d_.size() == 0 || d_.cwiseAbs().maxCoeff() <= tol;
  }

 private:
  void check_uncertainty() const {
    // Gamma + (i/2) Omega >= 0, checked on the Hermitian embedding.
    const int n = static_cast<int>(gamma_.rows());
    Eigen::MatrixXcd h = gamma_.cast<std::complex<double>>();
    const Mat omega = symplectic_form(n / 2);
    h += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h,
                                                       Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument(
          "GaussianState: covariance violates the uncertainty relation");
    }
  }

  Mat gamma_;
  Vec d_;
};

// Signed weight vector with L1 normalization applied at construction.
// Raw weights are kept for reporting.
class WeightVector {
 public:
  explicit WeightVector(Vec raw) : raw_(std::move(raw)) {
    if (raw_.size() == 0) {
      throw std::invalid_argument("WeightVector: empty weights");
    }
    double l1 = 0.0;
    for (int i = 0; i < raw_.size(); ++i) {
      if (std::abs(raw_[i]) < 1e-14) {
        throw std::invalid_argument("WeightVector: weight " +
                                    std::to_string(i) + " is zero");
      }
      l1 += std::abs(raw_[i]);
    }
    normalized_ = raw_ / l1;
    for (int i = 0; i < raw_.size(); ++i) {
      (raw_[i] > 0.0 ? pos_modes_ : neg_modes_).push_back(i);
    }
  }

  explicit WeightVector(const std::vector<double>& raw)
      : WeightVector(Eigen::Map<const Vec>(raw.data(),
                                           static_cast<long>(raw.size()))) {}

  int size() const { return static_cast<int>(raw_.size()); }
  const Vec& raw() const { return raw_; }
  const Vec& normalized() const { return normalized_; }
  const std::vector<int>& pos_modes() const { return pos_modes_; }
  const std::vector<int>& neg_modes() const { return neg_modes_; }
  bool single_sign() const {
    return pos_modes_.empty() || neg_modes_.empty();
  }

  // One sign group of the normalized weights: member mode indices, their
  // magnitudes, and the group's share of the L1 mass.
  struct SignGroup {
    std::vector<int> modes;
    Vec magnitudes;
    double l1 = 0.0;
  };

  SignGroup group(bool positive) const {
    const auto& modes = positive ? pos_modes_ : neg_modes_;
    SignGroup g;
    g.modes = modes;
    g.magnitudes.resize(static_cast<long>(modes.size()));
    for (std::size_t k = 0; k < modes.size(); ++k) {
      g.magnitudes[static_cast<long>(k)] = std::abs(normalized_[modes[k]]);
      g.l1 += g.magnitudes[static_cast<long>(k)];
    }
    return g;
  }

 private:
  Vec raw_;
  Vec normalized_;
  std::vector<int> pos_modes_;
  std::vector<int> neg_modes_;
};

inline GaussianState vacuum(int n_modes) {
  if (n_modes < 1) {
    throw std::invalid_argument("vacuum: n_modes must be >= 1");
  }
  return GaussianState(0.5 * Mat::Identity(2 * n_modes, 2 * n_modes),
                       Vec::Zero(2 * n_modes));
}

namespace detail {

inline void check_mode(int mode, int n_modes, const char* who) {
  if (mode < 0 || mode >= n_modes) {
    throw std::invalid_argument(std::string(who) + ": mode index " +
                                std::to_string(mode) + " out of range");
  }
}

inline Eigen::Matrix2d rotation2(double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
  return r;
}

}  // namespace detail

// Rotation R(phi) = [[cos, sin], [-sin, cos]] on the chosen mode block.
inline SymplecticMatrix phase_shifter(double phi, int mode, int n_modes) {
  detail::check_mode(mode, n_modes, "phase_shifter");
  Mat s = Mat::Identity(2 * n_modes, 2 * n_modes);
  s.block<2, 2>(2 * mode, 2 * mode) = detail::rotation2(phi);
  return SymplecticMatrix(std::move(s));
}

// B(theta) = exp[theta (a_i^dag a_j - a_i a_j^dag)]; theta = pi/4 is the
// balanced splitter, theta = pi/2 swaps the mode contents.
inline SymplecticMatrix beam_splitter(double theta, int i, int j,
                                      int n_modes) {
  detail::check_mode(i, n_modes, "beam_splitter");
  detail::check_mode(j, n_modes, "beam_splitter");
  if (i == j) {
    throw std::invalid_argument("beam_splitter: modes must differ");
  }
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  Mat s = Mat::Identity(2 * n_modes, 2 * n_modes);
  s.block<2, 2>(2 * i, 2 * i) = c * Eigen::Matrix2d::Identity();
  s.block<2, 2>(2 * j, 2 * j) = c * Eigen::Matrix2d::Identity();
  s.block<2, 2>(2 * i, 2 * j) = sn * Eigen::Matrix2d::Identity();
  s.block<2, 2>(2 * j, 2 * i) = -sn * Eigen::Matrix2d::Identity();
  return SymplecticMatrix(std::move(s));
}

// At varphi = 0 the x quadrature is stretched: vacuum maps to
// diag(e^{2r}, e^{-2r})/2. varphi rotates the squeezing axis.
inline SymplecticMatrix squeezer(double r, double varphi, int mode,
                                 int n_modes) {
  detail::check_mode(mode, n_modes, "squeezer");
  if (!std::isfinite(r)) {
    throw std::invalid_argument("squeezer: r must be finite");
  }
  Eigen::Matrix2d core;
  core << std::exp(r), 0.0, 0.0, std::exp(-r);
  const Eigen::Matrix2d rot = detail::rotation2(varphi);
  Mat s = Mat::Identity(2 * n_modes, 2 * n_modes);
  s.block<2, 2>(2 * mode, 2 * mode) = rot * core * rot.transpose();
  return SymplecticMatrix(std::move(s));
}

inline GaussianState displace(const GaussianState& state, int mode,
                              double alpha_re, double alpha_im) {
  detail::check_mode(mode, state.n_modes(), "displace");
  Vec d = state.d();
  d[2 * mode] += std::sqrt(2.0) * alpha_re;
  d[2 * mode + 1] += std::sqrt(2.0) * alpha_im;
  return GaussianState(state.gamma(), std::move(d));
}

inline GaussianState apply_symplectic(const GaussianState& state,
                                      const SymplecticMatrix& s) {
  if (s.n_modes() != state.n_modes()) {
    throw std::invalid_argument("apply_symplectic: dimension mismatch");
  }
  const Mat& m = s.matrix();
  return GaussianState(m * state.gamma() * m.transpose(), m * state.d());
}

inline double mode_photon_number(const GaussianState& state, int mode) {
  detail::check_mode(mode, state.n_modes(), "mode_photon_number");
  const auto block = state.mode_block(mode, mode);
  const double dx = state.d()[2 * mode];
  const double dp = state.d()[2 * mode + 1];
  return (block.trace() - 1.0) / 2.0 + (dx * dx + dp * dp) / 2.0;
}

inline double total_photon_number(const GaussianState& state) {
  double n = 0.0;
  for (int i = 0; i < state.n_modes(); ++i) {
    n += mode_photon_number(state, i);
  }
  return n;
}

// Photon-number variance of one mode. The cross-mode correlation formula
// does not apply on the diagonal; this is the direct fourth-moment result.
inline double mode_photon_variance(const GaussianState& state, int mode) {
  detail::check_mode(mode, state.n_modes(), "mode_photon_variance");
  const Eigen::Matrix2d block = state.mode_block(mode, mode);
  const Eigen::Vector2d dm = state.d().segment<2>(2 * mode);
  return (2.0 * (block * block).trace() - 1.0) / 4.0 +
         dm.dot(block * dm);
}

// Photon-number correlation <N_i N_j> - <N_i><N_j> of a zero-mean Gaussian
// state, i != j. In the vacuum-1/2 convention this is half the squared
// Frobenius norm of the cross-covariance block; it vanishes iff the two
// modes are uncorrelated, and it is non-negative by construction.
inline double photon_correlation(const GaussianState& state, int i, int j) {
  detail::check_mode(i, state.n_modes(), "photon_correlation");
  detail::check_mode(j, state.n_modes(), "photon_correlation");
  if (i == j) {
    throw std::invalid_argument(
        "photon_correlation: i == j; use mode_photon_variance");
  }
  if (!state.is_zero_mean()) {
    throw UnsupportedInputError(
        "photon_correlation: state must have zero first moments");
  }
  return 0.5 * state.mode_block(i, j).squaredNorm();
}

// Chain of two-mode splitters distributing mode `modes[0]` over `modes`
// so that the output intensity pattern matches the normalized magnitudes.
inline SymplecticMatrix bsn_on_modes(const Vec& magnitudes,
                                     const std::vector<int>& modes,
                                     int n_total_modes) {
  if (magnitudes.size() != static_cast<long>(modes.size()) ||
      modes.empty()) {
    throw std::invalid_argument("bsn_on_modes: inconsistent arguments");
  }
  const double l1 = magnitudes.sum();
  if (!(l1 > 0.0) || magnitudes.minCoeff() <= 0.0) {
    throw std::invalid_argument("bsn_on_modes: magnitudes must be positive");
  }
  const int k = static_cast<int>(modes.size());
  SymplecticMatrix s = SymplecticMatrix::identity(n_total_modes);
  double residual = l1;  // mass not yet routed past splitter j
  for (int j = 0; j + 1 < k; ++j) {
    const double ratio = std::clamp(magnitudes[j] / residual, 0.0, 1.0);
    const double theta = std::acos(std::sqrt(ratio));
    s = beam_splitter(theta, modes[j], modes[j + 1], n_total_modes) * s;
    residual -= magnitudes[j];
  }
  return s;
}

// Passive network whose first-column splitting ratios follow |w_i|/||w||_1.
// Defined for a single sign group only.
inline SymplecticMatrix build_bsn_from_weights(const WeightVector& w) {
  if (!w.single_sign()) {
    throw std::invalid_argument(
        "build_bsn_from_weights: weights must share one sign");
  }
  std::vector<int> modes(static_cast<std::size_t>(w.size()));
  for (int i = 0; i < w.size(); ++i) {
    modes[static_cast<std::size_t>(i)] = i;
  }
  return bsn_on_modes(w.normalized().cwiseAbs(), modes, w.size());
}

// |<psi_a|psi_b>| for pure Gaussian states, from covariances and means.
inline double pure_state_overlap(const GaussianState& a,
                                 const GaussianState& b) {
  if (a.n_modes() != b.n_modes()) {
    throw std::invalid_argument("pure_state_overlap: mode count mismatch");
  }
  if (!a.is_pure() || !b.is_pure()) {
    throw UnsupportedInputError("pure_state_overlap: states must be pure");
  }
  const Mat s = a.gamma() + b.gamma();
  Eigen::LLT<Mat> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailureError("pure_state_overlap: singular sum covariance");
  }
  double log_det = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  }
  const Vec delta = a.d() - b.d();
  const double qform = delta.dot(llt.solve(delta));
  const double overlap = std::exp(-0.25 * log_det - 0.25 * qform);
  return std::min(overlap, 1.0);
}

}  // namespace distsense
