#pragma once

// Test-only utilities: deterministic random-state generators and independent
// Fock-space oracles. Everything here stays independent of the covariance
// code paths it is used to check.

#include "distsense/distsense.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace distsense::testing {

struct RandomStateOptions {
  int n_modes = 2;
  double max_r = 0.6;
  double max_alpha = 0.0;  // 0 means zero-mean states
  int n_beam_splitters = 3;
};

// Random pure Gaussian state: per-mode squeezers, a few beam splitters,
// per-mode phases, optional displacements.
inline GaussianState random_pure_state(std::mt19937_64& rng,
                                       const RandomStateOptions& opt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = opt.n_modes;
  GaussianState state = vacuum(m);
  for (int i = 0; i < m; ++i) {
    const double r = opt.max_r * unit(rng);
    const double axis = 3.141592653589793 * unit(rng);
    state = apply_symplectic(state, squeezer(r, axis, i, m));
  }
  for (int k = 0; k < opt.n_beam_splitters && m > 1; ++k) {
    const int i = static_cast<int>(unit(rng) * m) % m;
    int j = static_cast<int>(unit(rng) * m) % m;
    if (j == i) {
      j = (i + 1) % m;
    }
    state = apply_symplectic(
        state, beam_splitter(3.141592653589793 * unit(rng), i, j, m));
  }
  for (int i = 0; i < m; ++i) {
    state = apply_symplectic(
        state, phase_shifter(6.283185307179586 * unit(rng), i, m));
  }
  if (opt.max_alpha > 0.0) {
    for (int i = 0; i < m; ++i) {
      state = displace(state, i, opt.max_alpha * (2.0 * unit(rng) - 1.0),
                       opt.max_alpha * (2.0 * unit(rng) - 1.0));
    }
  }
  return state;
}

// Photon-number moments of a single-mode squeezed vacuum summed directly
// over the even Fock ladder: |c_{2n}|^2 = tanh^{2n} r (2n)! / (4^n n!^2
// cosh r).
struct FockMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline FockMoments squeezed_vacuum_fock_moments(double r, int cutoff_pairs) {
  const double t2 = std::tanh(r) * std::tanh(r);
  double p = 1.0 / std::cosh(r);  // probability of |0>
  double mean = 0.0;
  double second = 0.0;
  for (int n = 0; n < cutoff_pairs; ++n) {
    mean += 2.0 * n * p;
    second += 4.0 * n * n * p;
    p *= t2 * (2.0 * n + 1.0) / (2.0 * n + 2.0);
  }
  return {mean, second - mean * mean};
}

inline double squeezed_vacuum_fock_mean_photon(double r, int cutoff_pairs) {
  return squeezed_vacuum_fock_moments(r, cutoff_pairs).mean;
}

// Full QFIM from the directional finite-difference oracle by polarization.
inline Mat qfim_from_oracle(const GaussianState& probe, double eps) {
  const int m = probe.n_modes();
  Mat h(m, m);
  Vec dir = Vec::Zero(m);
  std::vector<double> diag(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    dir.setZero();
    dir[i] = 1.0;
    diag[static_cast<std::size_t>(i)] =
        qfi_finite_difference_oracle(probe, dir, eps);
    h(i, i) = diag[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      dir.setZero();
      dir[i] = 1.0;
      dir[j] = 1.0;
      const double both = qfi_finite_difference_oracle(probe, dir, eps);
      const double off = 0.5 * (both - diag[static_cast<std::size_t>(i)] -
                                diag[static_cast<std::size_t>(j)]);
      h(i, j) = off;
      h(j, i) = off;
    }
  }
  return h;
}

inline Mat random_psd(std::mt19937_64& rng, int n, double ridge = 1e-6) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      r(i, j) = gauss(rng);
    }
  }
  return r * r.transpose() + ridge * Mat::Identity(n, n);
}

inline WeightVector random_weights(std::mt19937_64& rng, int m,
                                   bool force_mixed_signs) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sign =
        force_mixed_signs ? (i % 2 == 0 ? 1.0 : -1.0)
                          : (coin(rng) < 0.5 ? 1.0 : -1.0);
    w[static_cast<std::size_t>(i)] = sign * unit(rng);
  }
  return WeightVector(w);
}

}  // namespace distsense::testing
