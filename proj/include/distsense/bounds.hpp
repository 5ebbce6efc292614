#pragma once

// Analytic estimation-error bounds for distributed phase sensing and the
// photon-number allocation solvers behind them. All bounds take the
// L1-normalized weights and a total mean photon number.

#include "distsense/core.hpp"
#include "distsense/gaussian.hpp"

#include <cmath>
#include <tuple>
#include <utility>

namespace distsense {

struct AllocationResult {
  Vec n_bar;                  // per-entry mean photon numbers, summing to N
  double lagrange_multiplier = 0.0;  // proportionality constant g(N_k)/w_k^2
  double residual = 0.0;      // |sum(n_bar) - N| after the solve
};

namespace detail {

// g(N) = N^2 (N+1)^2 / (2N+1), strictly increasing on [0, inf).
inline double allocation_g(double n) {
  return n * n * (n + 1.0) * (n + 1.0) / (2.0 * n + 1.0);
}

// Inverse of g on [0, n_hi] by bisection; g is smooth and monotone, so this
// is unconditionally safe.
inline double allocation_g_inverse(double target, double n_hi) {
  if (target <= 0.0) {
    return 0.0;
  }
  if (target >= allocation_g(n_hi)) {
    return n_hi;
  }
  double lo = 0.0, hi = n_hi;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, n_hi);
       ++it) {
    const double mid = 0.5 * (lo + hi);
    (allocation_g(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Solve g(N_k) = lambda * c_k under sum(N_k) = N by bisection on lambda.
inline AllocationResult allocate_proportional(const Vec& coeffs,
                                              double n_total) {
  if (!(n_total > 0.0)) {
    throw std::invalid_argument("allocation: n_total must be positive");
  }
  const int k = static_cast<int>(coeffs.size());
  AllocationResult out;
  out.n_bar = Vec::Zero(k);
  if (k == 1) {
    out.n_bar[0] = n_total;
    out.lagrange_multiplier = allocation_g(n_total) / coeffs[0];
    out.residual = 0.0;
    return out;
  }
  const double c_min = coeffs.minCoeff();
  double lam_lo = 0.0;
  double lam_hi = allocation_g(n_total) / c_min;
  const auto total_at = [&](double lam) {
    double t = 0.0;
    for (int i = 0; i < k; ++i) {
      t += allocation_g_inverse(lam * coeffs[i], n_total);
    }
    return t;
  };
  double total = 0.0;
  int it = 0;
  for (; it < 200; ++it) {
    const double lam = 0.5 * (lam_lo + lam_hi);
    total = total_at(lam);
    if (std::abs(total - n_total) < 1e-12) {
      lam_lo = lam_hi = lam;
      break;
    }
    (total < n_total ? lam_lo : lam_hi) = lam;
  }
  const double lam = 0.5 * (lam_lo + lam_hi);
  for (int i = 0; i < k; ++i) {
    out.n_bar[i] = allocation_g_inverse(lam * coeffs[i], n_total);
  }
  out.lagrange_multiplier = lam;
  out.residual = std::abs(out.n_bar.sum() - n_total);
  if (out.residual > 1e-8 * std::max(1.0, n_total)) {
    throw NumericalFailureError("allocation: bisection did not converge");
  }
  return out;
}

}  // namespace detail

// Coherent-probe (shot-noise) bound: sum_i w_i^2 / (4 N_i) with
// N_i = |w_i| N, which collapses to 1/(4N) for normalized weights.
inline double sql_bound(const WeightVector& w, double n_total) {
  if (!(n_total > 0.0)) {
    throw std::invalid_argument("sql_bound: n_total must be positive");
  }
  const Vec& wn = w.normalized();
  double b = 0.0;
  for (int i = 0; i < wn.size(); ++i) {
    b += wn[i] * wn[i] / (4.0 * std::abs(wn[i]) * n_total);
  }
  return b;
}

// Optimal per-mode photon split for a product of squeezed vacua:
// N_i^2 (N_i+1)^2 / (2 N_i + 1) proportional to w_i^2.
inline AllocationResult allocate_product(const WeightVector& w,
                                         double n_total) {
  return detail::allocate_proportional(
      w.normalized().cwiseAbs2(), n_total);
}

inline double product_squeezed_bound(const WeightVector& w, double n_total) {
  const AllocationResult alloc = allocate_product(w, n_total);
  const Vec& wn = w.normalized();
  double b = 0.0;
  for (int i = 0; i < wn.size(); ++i) {
    b += wn[i] * wn[i] /
         (8.0 * alloc.n_bar[i] * (alloc.n_bar[i] + 1.0));
  }
  return b;
}

// Best error for a one-sign group holding n_group photons. Depends on the
// group only through its L1 mass, not on how magnitude spreads inside it.
inline double group_bound(double group_l1, double n_group) {
  if (!(n_group > 0.0)) {
    throw std::invalid_argument("group_bound: n_group must be positive");
  }
  return group_l1 * group_l1 / (8.0 * n_group * (n_group + 1.0));
}

inline double group_bound(const WeightVector& w_group, double n_group) {
  if (!w_group.single_sign()) {
    throw std::invalid_argument("group_bound: weights must share one sign");
  }
  return group_bound(1.0, n_group);
}

// Photon split between the two sign groups; single-sign input returns the
// trivial single-entry allocation.
inline AllocationResult allocate_groups(const WeightVector& w,
                                        double n_total) {
  if (w.single_sign()) {
    Vec c(1);
    c[0] = 1.0;
    return detail::allocate_proportional(c, n_total);
  }
  Vec c(2);
  c[0] = w.group(true).l1;
  c[1] = w.group(false).l1;
  return detail::allocate_proportional(c.cwiseAbs2(), n_total);
}

// Error of the two-group scheme at its optimal group allocation; for a
// single sign this is just the group bound with all photons.
inline double proposed_bound(const WeightVector& w, double n_total) {
  if (w.single_sign()) {
    return group_bound(1.0, n_total);
  }
  const AllocationResult alloc = allocate_groups(w, n_total);
  return group_bound(w.group(true).l1, alloc.n_bar[0]) +
         group_bound(w.group(false).l1, alloc.n_bar[1]);
}

// 2/3-norm envelope (||w+||_1^{2/3} + ||w-||_1^{2/3})^3 / (8 N^2); the
// proposed bound stays strictly below it, and it never exceeds 1/(4 N^2).
inline double heisenberg_envelope(const WeightVector& w, double n_total) {
  if (!(n_total > 0.0)) {
    throw std::invalid_argument("heisenberg_envelope: n_total must be "
                                "positive");
  }
  double s = 0.0;
  if (!w.pos_modes().empty()) {
    s += std::cbrt(w.group(true).l1 * w.group(true).l1);
  }
  if (!w.neg_modes().empty()) {
    s += std::cbrt(w.group(false).l1 * w.group(false).l1);
  }
  return s * s * s / (8.0 * n_total * n_total);
}

// The three tabulated bounds for the half-and-half sign pattern
// w_i = +-1/M with n_per_mode photons in each mode:
//   naive global   1 / (4 M nbar)
//   product        1 / (8 M nbar (nbar + 1))
//   two-group      1 / (4 N (2N + 1)) at N = M nbar
inline std::tuple<double, double, double> appendix_d_triple(
    int m_modes, double n_per_mode) {
  if (m_modes < 2 || m_modes % 2 != 0) {
    throw std::invalid_argument("appendix_d_triple: M must be even and >= 2");
  }
  if (!(n_per_mode > 0.0)) {
    throw std::invalid_argument("appendix_d_triple: n_per_mode must be "
                                "positive");
  }
  const double m = static_cast<double>(m_modes);
  const double n_total = m * n_per_mode;
  const double naive = 1.0 / (4.0 * m * n_per_mode);
  const double product = 1.0 / (8.0 * m * n_per_mode * (n_per_mode + 1.0));
  const double proposed = 1.0 / (4.0 * n_total * (2.0 * n_total + 1.0));
  return {naive, product, proposed};
}

}  // namespace distsense
