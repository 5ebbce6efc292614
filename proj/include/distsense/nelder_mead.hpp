#pragma once

// Plain Nelder-Mead simplex minimizer. Deterministic: no internal
// randomness, ties broken by index order.

#include "distsense/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace distsense {

struct NelderMeadOptions {
  int max_iterations = 5000;
  double x_tolerance = 1e-9;   // simplex diameter
  double f_tolerance = 1e-12;  // spread of function values
  double initial_step = 0.3;
};

struct NelderMeadResult {
  Vec x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
  double simplex_diameter = 0.0;
};

inline NelderMeadResult nelder_mead(
    const std::function<double(const Vec&)>& f, const Vec& x0,
    const NelderMeadOptions& opt = {}) {
  const int n = static_cast<int>(x0.size());
  std::vector<Vec> xs(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> fs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i) + 1][i] += opt.initial_step;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fs[i] = f(xs[i]);
  }
  std::vector<int> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fs[a] < fs[b]; });
  };

  NelderMeadResult result;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    sort_simplex();
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[order.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      diameter = std::max(diameter, (xs[order[i]] - xs[best]).norm());
    }
    const double spread = fs[worst] - fs[best];
    if (diameter < opt.x_tolerance &&
        spread < opt.f_tolerance * (1.0 + std::abs(fs[best]))) {
      result.converged = true;
      break;
    }

    Vec centroid = Vec::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      centroid += xs[order[i]];
    }
    centroid /= static_cast<double>(n);

    const Vec reflected = centroid + (centroid - xs[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < fs[best]) {
      const Vec expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        xs[worst] = expanded;
        fs[worst] = f_expanded;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_reflected;
      }
    } else if (f_reflected < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_reflected;
    } else {
      const bool outside = f_reflected < fs[worst];
      const Vec contracted =
          outside ? (centroid + 0.5 * (reflected - centroid)).eval()
                  : (centroid + 0.5 * (xs[worst] - centroid)).eval();
      const double f_contracted = f(contracted);
      if (f_contracted < std::min(f_reflected, fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = f_contracted;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 1; i < order.size(); ++i) {
          const int k = order[i];
          xs[k] = xs[order[0]] + 0.5 * (xs[k] - xs[order[0]]);
          fs[k] = f(xs[k]);
        }
      }
    }
  }
  sort_simplex();
  result.x = xs[order.front()];
  result.fx = fs[order.front()];
  result.iterations = it;
  double diameter = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    diameter = std::max(diameter, (xs[order[i]] - xs[order[0]]).norm());
  }
  result.simplex_diameter = diameter;
  return result;
}

}  // namespace distsense
