#pragma once

// Monte Carlo achievability check: sample homodyne outcomes from a scheme's
// measured-quadrature distribution and fit the phases by local maximum
// likelihood, to compare the estimator variance against the analytic bound.
//
// Sampling is counter-based (SplitMix64 + Box-Muller), so a batch is fully
// determined by its seed.

#include "distsense/core.hpp"
#include "distsense/fisher.hpp"
#include "distsense/nelder_mead.hpp"
#include "distsense/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace distsense {

inline constexpr const char* kSamplerAlgorithm = "splitmix64/box-muller/v1";

struct SampleBatch {
  Mat outcomes;       // nu x M, one homodyne value per mode per shot
  std::uint64_t seed = 0;
  SchemeSpec scheme;
  Vec true_phases;
  Vec angles;         // homodyne angles the samples were taken at
  std::string rng_algorithm = kSamplerAlgorithm;

  SampleBatch(Mat o, std::uint64_t s, SchemeSpec sc, Vec phases, Vec a)
      : outcomes(std::move(o)),
        seed(s),
        scheme(std::move(sc)),
        true_phases(std::move(phases)),
        angles(std::move(a)) {}

  // Empirical second-moment matrix of the zero-mean outcome model.
  Mat second_moments() const {
    return outcomes.transpose() * outcomes /
           static_cast<double>(outcomes.rows());
  }

  // Columns whose sample mean strays beyond 5 sigma / sqrt(nu); the model
  // is zero-mean, so a non-empty result flags a sampling problem.
  std::vector<int> suspicious_column_means() const {
    std::vector<int> flagged;
    const double nu = static_cast<double>(outcomes.rows());
    for (int j = 0; j < outcomes.cols(); ++j) {
      const double mean = outcomes.col(j).mean();
      const double sd = std::sqrt(outcomes.col(j).squaredNorm() / nu);
      if (std::abs(mean) > 5.0 * sd / std::sqrt(nu)) {
        flagged.push_back(j);
      }
    }
    return flagged;
  }
};

// nu i.i.d. draws from the zero-mean normal with the scheme's homodyne
// covariance at the true phases and refined optimal angles.
inline SampleBatch sample_homodyne(const SchemeSpec& scheme,
                                   const Vec& true_phases, long nu,
                                   std::uint64_t seed) {
  if (nu < 1) {
    throw std::invalid_argument("sample_homodyne: nu must be >= 1");
  }
  const GaussianState probe = build_probe(scheme);
  if (!probe.is_zero_mean()) {
    throw UnsupportedInputError(
        "sample_homodyne: displacement schemes are not supported");
  }
  const Vec angles = homodyne_angles(scheme, true_phases);
  const Mat cov = homodyne_covariance(probe, true_phases, angles);
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailureError("sample_homodyne: covariance not positive "
                                "definite");
  }
  const Mat l = llt.matrixL();
  const int m = probe.n_modes();
  Mat outcomes(nu, m);
  Vec z(m);
  for (long k = 0; k < nu; ++k) {
    for (int j = 0; j < m; ++j) {
      const std::uint64_t t =
          2 * (static_cast<std::uint64_t>(k) * m + static_cast<std::uint64_t>(j));
      const double u1 = uniform_open01(seed, t);
      const double u2 = uniform_open01(seed, t + 1);
      z[j] = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
    }
    outcomes.row(k) = (l * z).transpose();
  }
  return SampleBatch(std::move(outcomes), seed, scheme, true_phases, angles);
}

// Mean per-sample log-likelihood of the batch under phases phi, with the
// measurement angles fixed at the sampling values.
inline double mean_log_likelihood(const GaussianState& probe,
                                  const Vec& angles, const Mat& second_moments,
                                  const Vec& phi) {
  const Mat cov = homodyne_covariance(probe, phi, angles);
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailureError("mean_log_likelihood: singular model "
                                "covariance");
  }
  double log_det = 0.0;
  for (int i = 0; i < cov.rows(); ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  }
  const double trace_term = llt.solve(second_moments).trace();
  const double m = static_cast<double>(cov.rows());
  return -0.5 * (m * std::log(2.0 * std::numbers::pi) + log_det + trace_term);
}

inline double mean_log_likelihood(const SampleBatch& batch, const Vec& phi) {
  return mean_log_likelihood(build_probe(batch.scheme), batch.angles,
                             batch.second_moments(), phi);
}

struct MleResult {
  double phi_star_hat = 0.0;
  Vec phases_hat;
};

// Local maximum-likelihood phase fit from the empirical second moments;
// init must be close to the truth (global unwrapping is out of scope).
inline MleResult mle_from_moments(const GaussianState& probe,
                                  const Vec& angles, const Mat& second_moments,
                                  const WeightVector& w, const Vec& init) {
  const auto cost = [&](const Vec& phi) {
    try {
      return -mean_log_likelihood(probe, angles, second_moments, phi);
    } catch (const NumericalFailureError&) {
      return 1e100;
    }
  };
  NelderMeadOptions opt;
  opt.max_iterations = 4000;
  opt.x_tolerance = 1e-10;
  opt.f_tolerance = 1e-14;
  opt.initial_step = 0.02;
  const NelderMeadResult r = nelder_mead(cost, init, opt);
  if (!r.converged) {
    throw NumericalFailureError("mle: likelihood optimizer did not converge");
  }
  MleResult out;
  out.phases_hat = r.x;
  out.phi_star_hat = w.normalized().dot(r.x);
  return out;
}

inline MleResult mle_phi_star(const SampleBatch& batch, const WeightVector& w,
                              const Vec& init) {
  return mle_from_moments(build_probe(batch.scheme), batch.angles,
                          batch.second_moments(), w, init);
}

struct SaturabilityReport {
  double var_ratio_to_crb = 0.0;  // Var(phi*_hat) * nu / bound
  double bias = 0.0;              // |mean(phi*_hat) - phi*|
  double crb = 0.0;               // per-shot bound on phi*
  long nu = 0;
  int batches = 0;
  std::uint64_t seed = 0;
};

// Repeated-batch study: per-batch MLE of phi* = w . phi, variance across
// batches against bound/nu. Per-batch seeds derive from the single run seed,
// so results are independent of the thread count; estimates land in batch
// order.
inline SaturabilityReport run_saturability(const SchemeSpec& scheme,
                                           const WeightVector& w,
                                           const Vec& true_phases, long nu,
                                           int batches, std::uint64_t seed,
                                           double bound_per_shot,
                                           int threads = 1) {
  if (batches < 2) {
    throw std::invalid_argument("run_saturability: need at least 2 batches");
  }
  const GaussianState probe = build_probe(scheme);
  const double phi_star_true = w.normalized().dot(true_phases);
  std::vector<double> estimates(static_cast<std::size_t>(batches), 0.0);
  const auto run_range = [&](int begin, int stride) {
    for (int b = begin; b < batches; b += stride) {
      const std::uint64_t batch_seed =
          splitmix64(seed, static_cast<std::uint64_t>(b));
      const SampleBatch batch =
          sample_homodyne(scheme, true_phases, nu, batch_seed);
      const MleResult fit = mle_from_moments(probe, batch.angles,
                                             batch.second_moments(), w,
                                             true_phases);
      estimates[static_cast<std::size_t>(b)] = fit.phi_star_hat;
    }
  };
  threads = std::max(1, std::min(threads, batches));
  if (threads == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(run_range, t, threads);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  double mean = 0.0;
  for (const double e : estimates) {
    mean += e;
  }
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (const double e : estimates) {
    var += (e - mean) * (e - mean);
  }
  var /= static_cast<double>(batches - 1);

  SaturabilityReport report;
  report.crb = bound_per_shot;
  report.var_ratio_to_crb =
      var * static_cast<double>(nu) / bound_per_shot;
  report.bias = std::abs(mean - phi_star_true);
  report.nu = nu;
  report.batches = batches;
  report.seed = seed;
  return report;
}

}  // namespace distsense
