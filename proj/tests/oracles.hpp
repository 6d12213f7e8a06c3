// Test-only oracles, independent of the library's implementation paths:
// central finite differences for gradients, grid search for the agents'
// best response, and plain statistics helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "perfsim/loss.hpp"

namespace oracles {

// Central finite difference of the per-sample loss at step h.
inline perfsim::ParamVector fd_gradient(const perfsim::LossModel& loss,
                                        const perfsim::Sample& z,
                                        const perfsim::ParamVector& theta,
                                        double h = 1e-6) {
  perfsim::ParamVector g(theta.size());
  perfsim::ParamVector t = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    t[i] = theta[i] + h;
    const double up = loss.value(z, t);
    t[i] = theta[i] - h;
    const double down = loss.value(z, t);
    t[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Agent utility: linear gain minus quadratic manipulation cost, moving only
// the strategic coordinates.
inline double agent_utility(const Eigen::VectorXd& x_new, const Eigen::VectorXd& x,
                            const perfsim::ParamVector& theta, double epsilon) {
  return -theta.dot(x_new) - (x_new - x).squaredNorm() / (2.0 * epsilon);
}

// Exhaustive grid search over the strategic coordinates; the returned value
// is the best utility found.
inline double grid_search_best_utility(const Eigen::VectorXd& x,
                                       const perfsim::ParamVector& theta,
                                       double epsilon,
                                       const std::vector<Eigen::Index>& dims,
                                       int points_per_dim, double radius) {
  Eigen::VectorXd candidate = x;
  double best = agent_utility(candidate, x, theta, epsilon);
  std::vector<int> idx(dims.size(), 0);
  const auto coord = [&](std::size_t d, int i) {
    const double t = points_per_dim == 1
                         ? 0.0
                         : -radius + 2.0 * radius * i / (points_per_dim - 1);
    return x[dims[d]] + t;
  };
  for (;;) {
    for (std::size_t d = 0; d < dims.size(); ++d)
      candidate[dims[d]] = coord(d, idx[d]);
    best = std::max(best, agent_utility(candidate, x, theta, epsilon));
    std::size_t d = 0;
    while (d < dims.size() && ++idx[d] == points_per_dim) idx[d++] = 0;
    if (d == dims.size()) break;
  }
  return best;
}

inline double mean(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

inline double sample_sd(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double se_of_mean(std::span<const double> v) {
  return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace oracles
