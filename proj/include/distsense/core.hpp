#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace distsense {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when a target parameter lies outside the support of a singular
// Fisher matrix; carries the norm of the out-of-support component.
class NotEstimableError : public std::runtime_error {
 public:
  NotEstimableError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Input is well-formed but outside the domain an operation supports
// (e.g. mixed state where a pure one is required).
class UnsupportedInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Symplectic form for M modes in interleaved quadrature ordering
// (x1, p1, ..., xM, pM): Omega = I_M (+) [[0,1],[-1,0]].
inline Mat symplectic_form(int n_modes) {
  Mat omega = Mat::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    omega(2 * i, 2 * i + 1) = 1.0;
    omega(2 * i + 1, 2 * i) = -1.0;
  }
  return omega;
}

// SplitMix64: counter-based generator, reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in the open interval (0, 1); never returns 0 so it is safe
// under a logarithm.
inline double uniform_open01(std::uint64_t seed, std::uint64_t counter) {
  return (static_cast<double>(splitmix64(seed, counter) >> 11) + 0.5) *
         0x1.0p-53;
}

}  // namespace distsense
