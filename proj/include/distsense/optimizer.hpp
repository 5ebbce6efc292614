#pragma once

// Derivative-free minimization of the two-mode weighted quantum bound over
// squeezed-displaced probe circuits, at a fixed split of the photon budget
// between squeezing and displacement.

#include "distsense/core.hpp"
#include "distsense/fisher.hpp"
#include "distsense/nelder_mead.hpp"
#include "distsense/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace distsense {

struct TwoModeParams {
  double r1 = 0.0, r2 = 0.0;          // squeezing magnitudes
  double varphi1 = 0.0, varphi2 = 0.0;  // squeezing axes
  double a1_mag = 0.0, a1_arg = 0.0;  // displacements, polar
  double a2_mag = 0.0, a2_arg = 0.0;
  double theta = 0.0;                 // beam-splitter angle
};

struct MinimizeResult {
  TwoModeParams params;
  double qcrb = 0.0;
  bool converged = false;
  int converged_restarts = 0;
  std::vector<double> restart_values;  // best objective of each restart
};

class TwoModeOptimizationFailure : public NumericalFailureError {
 public:
  TwoModeOptimizationFailure(const std::string& what, MinimizeResult best)
      : NumericalFailureError(what), best_so_far(std::move(best)) {}
  MinimizeResult best_so_far;
};

namespace detail {

inline double halton(int index, int base) {
  double f = 1.0, value = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    value += f * (i % base);
    i /= base;
  }
  return value;
}

// Energy constraints are built into the packing: the squeezing budget is
// split by sin^2 of one angle, likewise the displacement budget. Inactive
// budgets contribute no free parameters.
struct TwoModePacking {
  double n_squeeze = 0.0;
  double n_displace = 0.0;
  bool has_squeeze = false;
  bool has_displace = false;

  TwoModePacking(double n_total, double squeeze_ratio) {
    n_squeeze = squeeze_ratio * n_total;
    n_displace = (1.0 - squeeze_ratio) * n_total;
    has_squeeze = n_squeeze > 0.0;
    has_displace = n_displace > 0.0;
  }

  int dimension() const {
    return 1 + (has_squeeze ? 3 : 0) + (has_displace ? 3 : 0);
  }

  TwoModeParams unpack(const Vec& z) const {
    TwoModeParams p;
    int idx = 0;
    if (has_squeeze) {
      const double fs = std::sin(z[idx]) * std::sin(z[idx]);
      p.r1 = std::asinh(std::sqrt(fs * n_squeeze));
      p.r2 = std::asinh(std::sqrt((1.0 - fs) * n_squeeze));
      p.varphi1 = z[idx + 1];
      p.varphi2 = z[idx + 2];
      idx += 3;
    }
    if (has_displace) {
      const double fd = std::sin(z[idx]) * std::sin(z[idx]);
      p.a1_mag = std::sqrt(fd * n_displace);
      p.a2_mag = std::sqrt((1.0 - fd) * n_displace);
      p.a1_arg = z[idx + 1];
      p.a2_arg = z[idx + 2];
      idx += 3;
    }
    p.theta = z[idx];
    return p;
  }

  Vec seed(int restart, std::uint64_t jitter_seed,
           std::uint64_t* counter) const {
    static constexpr int kBases[7] = {2, 3, 5, 7, 11, 13, 17};
    const int dim = dimension();
    Vec z(dim);
    int idx = 0;
    const auto low_discrepancy = [&](double lo, double hi) {
      const double u = halton(restart + 1, kBases[idx % 7]);
      const double jitter =
          0.05 * (uniform_open01(jitter_seed, (*counter)++) - 0.5);
      return lo + (hi - lo) * u + jitter;
    };
    if (has_squeeze) {
      z[idx] = low_discrepancy(0.0, std::numbers::pi / 2.0); ++idx;
      z[idx] = low_discrepancy(0.0, std::numbers::pi); ++idx;
      z[idx] = low_discrepancy(0.0, std::numbers::pi); ++idx;
    }
    if (has_displace) {
      z[idx] = low_discrepancy(0.0, std::numbers::pi / 2.0); ++idx;
      z[idx] = low_discrepancy(0.0, 2.0 * std::numbers::pi); ++idx;
      z[idx] = low_discrepancy(0.0, 2.0 * std::numbers::pi); ++idx;
    }
    z[idx] = low_discrepancy(0.0, std::numbers::pi);
    return z;
  }
};

inline CustomTwoModeParams to_custom(const TwoModeParams& p) {
  CustomTwoModeParams c;
  c.r1 = p.r1;
  c.varphi1 = p.varphi1;
  c.r2 = p.r2;
  c.varphi2 = p.varphi2;
  c.alpha1_re = p.a1_mag * std::cos(p.a1_arg);
  c.alpha1_im = p.a1_mag * std::sin(p.a1_arg);
  c.alpha2_re = p.a2_mag * std::cos(p.a2_arg);
  c.alpha2_im = p.a2_mag * std::sin(p.a2_arg);
  c.theta = p.theta;
  return c;
}

}  // namespace detail

// Distance of theta from the nearest multiple of pi/2 (trivial network).
inline double theta_lattice_distance(double theta) {
  const double q = std::numbers::pi / 2.0;
  const double r = std::remainder(theta, q);
  return std::abs(r);
}

// Minimize the weighted quantum bound over the two-mode circuit family with
// squeeze_ratio of the photons in squeezing and the rest in displacement.
// Runs `restarts` Nelder-Mead starts from a low-discrepancy seed set; when
// the optimum has a flat beam-splitter direction, the reported angle is
// snapped to the trivial-network lattice if that costs nothing.
inline MinimizeResult minimize_two_mode(const WeightVector& w, double n_total,
                                        double squeeze_ratio,
                                        int restarts = 16) {
  if (w.size() != 2) {
    throw std::invalid_argument("minimize_two_mode: exactly two modes");
  }
  if (!(n_total > 0.0)) {
    throw std::invalid_argument("minimize_two_mode: n_total must be positive");
  }
  if (!(squeeze_ratio >= 0.0 && squeeze_ratio <= 1.0)) {
    throw std::invalid_argument("minimize_two_mode: ratio outside [0, 1]");
  }
  if (restarts < 1) {
    throw std::invalid_argument("minimize_two_mode: restarts must be >= 1");
  }
  const detail::TwoModePacking packing(n_total, squeeze_ratio);
  const auto objective = [&](const Vec& z) {
    try {
      const SchemeSpec spec(SchemeKind::custom_two_mode, w, n_total,
                            detail::to_custom(packing.unpack(z)));
      return qcrb(qfim_pure(build_probe(spec)), w);
    } catch (const NotEstimableError&) {
      return 1e9;
    } catch (const NumericalFailureError&) {
      return 1e9;
    }
  };

  NelderMeadOptions opt;
  opt.max_iterations = 5000;
  opt.x_tolerance = 1e-9;
  opt.f_tolerance = 1e-13;
  opt.initial_step = 0.25;

  std::uint64_t jitter_counter = 0;
  constexpr std::uint64_t kJitterSeed = 0x5EED;
  NelderMeadResult best;
  best.fx = 1e300;
  int converged_restarts = 0;
  std::vector<double> restart_values;
  restart_values.reserve(static_cast<std::size_t>(restarts));
  for (int s = 0; s < restarts; ++s) {
    const Vec z0 = packing.seed(s, kJitterSeed, &jitter_counter);
    const NelderMeadResult r = nelder_mead(objective, z0, opt);
    if (r.converged) {
      ++converged_restarts;
    }
    restart_values.push_back(r.fx);
    if (r.fx < best.fx) {
      best = r;
    }
  }

  // Canonicalize: freeze theta on the nearest pi/2 lattice point, re-polish
  // the remaining parameters, and keep the snapped form only if it matches
  // the unrestricted optimum.
  const int dim = packing.dimension();
  const int theta_idx = dim - 1;
  const double q = std::numbers::pi / 2.0;
  const double theta_snap = std::round(best.x[theta_idx] / q) * q;
  const auto reduced_objective = [&](const Vec& zr) {
    Vec z(dim);
    z.head(theta_idx) = zr;
    z[theta_idx] = theta_snap;
    return objective(z);
  };
  NelderMeadResult snapped;
  snapped.fx = 1e300;
  for (int s = 0; s < 4; ++s) {
    Vec zr0 = best.x.head(theta_idx);
    for (int d = 0; d < theta_idx; ++d) {
      zr0[d] +=
          0.1 * s * (uniform_open01(kJitterSeed, jitter_counter++) - 0.5);
    }
    const NelderMeadResult r = nelder_mead(reduced_objective, zr0, opt);
    if (r.fx < snapped.fx) {
      snapped = r;
    }
  }
  if (snapped.fx <= best.fx + 1e-9 * std::abs(best.fx) + 1e-15) {
    best.x.head(theta_idx) = snapped.x;
    best.x[theta_idx] = theta_snap;
    best.fx = snapped.fx;
  }

  MinimizeResult result;
  result.params = packing.unpack(best.x);
  result.qcrb = best.fx;
  result.converged = converged_restarts > 0;
  result.converged_restarts = converged_restarts;
  result.restart_values = std::move(restart_values);
  if (!result.converged) {
    throw TwoModeOptimizationFailure(
        "minimize_two_mode: no restart converged", result);
  }
  return result;
}

struct SweepRow {
  double ratio = 0.0;
  double qcrb = 0.0;
  TwoModeParams params;
  bool converged = false;
};

// One minimization per grid point; failures are flagged rows carrying the
// best value found, and never abort the sweep.
inline std::vector<SweepRow> sweep_ratio(const WeightVector& w,
                                         double n_total,
                                         const std::vector<double>& grid,
                                         int restarts = 16) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const double ratio : grid) {
    SweepRow row;
    row.ratio = ratio;
    try {
      const MinimizeResult r =
          minimize_two_mode(w, n_total, ratio, restarts);
      row.qcrb = r.qcrb;
      row.params = r.params;
      row.converged = true;
    } catch (const TwoModeOptimizationFailure& e) {
      row.qcrb = e.best_so_far.qcrb;
      row.params = e.best_so_far.params;
      row.converged = false;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace distsense
