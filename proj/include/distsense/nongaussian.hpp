#pragma once

// Two-mode Fock-space oracle for photon-number GHZ states. GHZ-type states
// are exact at their own photon-number cutoff, so no truncation management
// is needed; sums are direct.

#include "distsense/core.hpp"
#include "distsense/fisher.hpp"
#include "distsense/gaussian.hpp"

#include <complex>
#include <string>
#include <utility>

namespace distsense {

class FockStateTwoMode {
 public:
  explicit FockStateTwoMode(Eigen::MatrixXcd amplitudes)
      : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.rows() != amplitudes_.cols() || amplitudes_.rows() == 0) {
      throw std::invalid_argument(
          "FockStateTwoMode: amplitude grid must be square");
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > 1e-12) {
      throw std::invalid_argument("FockStateTwoMode: state not normalized");
    }
  }

  int cutoff() const { return static_cast<int>(amplitudes_.rows()) - 1; }
  const Eigen::MatrixXcd& amplitudes() const { return amplitudes_; }

  // <f(n1, n2)> over the joint photon-number distribution.
  template <typename F>
  double number_expectation(F&& f) const {
    double acc = 0.0;
    for (int n1 = 0; n1 <= cutoff(); ++n1) {
      for (int n2 = 0; n2 <= cutoff(); ++n2) {
        const double p = std::norm(amplitudes_(n1, n2));
        if (p > 0.0) {
          acc += p * f(n1, n2);
        }
      }
    }
    return acc;
  }

 private:
  Eigen::MatrixXcd amplitudes_;
};

enum class GhzKind { noon, nnoo };

inline FockStateTwoMode ghz_state(GhzKind kind, int n) {
  if (n < 1) {
    throw std::invalid_argument("ghz_state: n must be >= 1");
  }
  Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  const double c = 1.0 / std::sqrt(2.0);
  if (kind == GhzKind::noon) {
    amp(n, 0) = c;
    amp(0, n) = c;
  } else {
    amp(n, n) = c;
    amp(0, 0) = c;
  }
  return FockStateTwoMode(std::move(amp));
}

inline double fock_mean_photon(const FockStateTwoMode& state, int mode) {
  if (mode != 0 && mode != 1) {
    throw std::invalid_argument("fock_mean_photon: mode must be 0 or 1");
  }
  return state.number_expectation(
      [mode](int n1, int n2) { return mode == 0 ? n1 : n2; });
}

// <N1 N2> - <N1><N2> by direct summation.
inline double fock_photon_correlation(const FockStateTwoMode& state) {
  const double n1 = fock_mean_photon(state, 0);
  const double n2 = fock_mean_photon(state, 1);
  const double n12 = state.number_expectation(
      [](int a, int b) { return static_cast<double>(a) * b; });
  return n12 - n1 * n2;
}

// Phase-estimation QFIM of a photon-number-diagonal-generator pair:
// H_ij = 4 (<N_i N_j> - <N_i><N_j>).
inline FisherMatrix fock_qfim(const FockStateTwoMode& state) {
  const double n1 = fock_mean_photon(state, 0);
  const double n2 = fock_mean_photon(state, 1);
  const double v1 = state.number_expectation([](int a, int) {
    return static_cast<double>(a) * a;
  }) - n1 * n1;
  const double v2 = state.number_expectation([](int, int b) {
    return static_cast<double>(b) * b;
  }) - n2 * n2;
  const double c = fock_photon_correlation(state);
  Mat h(2, 2);
  h << 4.0 * v1, 4.0 * c, 4.0 * c, 4.0 * v2;
  return FisherMatrix(std::move(h), FisherKind::quantum);
}

// Projected bound w_raw^T H^+ w_raw, reported at the raw (unnormalized)
// weight scale: for the +-1 sign patterns this is the bound on the plain
// sum or difference of the two phases, 1/Nbar^2 for the matched GHZ state.
inline double fock_bound(const FockStateTwoMode& state,
                         const WeightVector& w) {
  if (w.size() != 2) {
    throw std::invalid_argument("fock_bound: two weights required");
  }
  const FisherMatrix h = fock_qfim(state);
  const PseudoInverse p = pinv_on_support(h);
  const Vec& wr = w.raw();
  const double residual = (wr - p.support_projector * wr).norm() / wr.norm();
  if (residual > 1e-8) {
    throw NotEstimableError("fock_bound: weights outside the Fisher support",
                            residual);
  }
  return wr.dot(p.pinv * wr);
}

}  // namespace distsense
