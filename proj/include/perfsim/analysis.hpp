#pragma once

#include <span>
#include <vector>

#include "perfsim/environment.hpp"

namespace perfsim {

// Inputs for the theoretical bound evaluators.
struct BoundParams {
  ProblemConstants constants;
  double theta1_dist_sq = 0.0;
  double M_greedy = 0.0;
  double n0 = 1.0;
  double alpha = 1.0;
  double alpha0 = 0.5;
  double c_lazy = 0.0;
  double M_lazy = 0.0;
  bool lazy_valid = false;  // c_lazy < 1

  static BoundParams make(const ProblemConstants& c, double theta1_dist_sq,
                          double n0 = 1.0, double alpha = 1.0,
                          double alpha0 = 0.5);
};

// Greedy mean-square bound after k updates: M_greedy / ((gamma-eps*beta)^2 k + 8 L^2)
// with M_greedy = max{2 sigma^2, 8 L^2 |theta1 - theta_PS|^2}. Requires
// epsilon < gamma/beta.
double greedy_bound(std::int64_t k, const BoundParams& params);

// Explicit contraction constant of the lazy recursion:
//   c = 32 L^2/(gamma^2 n0) + 24 eps beta L/(gamma^2 sqrt(n0))
//     + 1.1 sigma eps beta/(gamma^2 n0^{1-alpha0}) + (eps beta/gamma)^2.
// Monotone decreasing in n0; the caller checks c < 1.
double lazy_contraction_constant(const ProblemConstants& c, double n0,
                                 double alpha0);

// M_lazy = 3 (sigma + gamma)^2 / (gamma^2 (1 - c)).
double lazy_m_constant(const ProblemConstants& c, double c_lazy);

// Exact W1 between two equal-size empirical measures on the line:
// mean absolute difference of matched order statistics. Inputs sorted.
double empirical_w1_1d(std::span<const double> sorted_a,
                       std::span<const double> sorted_b);

struct SensitivityOptions {
  std::int64_t n_samples = 100000;
  int bootstrap = 100;
  // Coordinate of the sample feature vector to audit; -1 audits the label
  // (the only theta-dependent coordinate of some environments).
  Eigen::Index coordinate = 0;
  // Draw both sample sets from identically-seeded streams (couples the base
  // draws; exact for the strategic map).
  bool paired = false;
  // Pass when w1 <= bound + 3 se; for theta == theta' the bound is zero and
  // the check is w1 <= abs_tol.
  double abs_tol = 1e-9;
};

struct SensitivityRow {
  ParamVector theta_a;
  ParamVector theta_b;
  double dtheta_norm = 0.0;
  double w1 = 0.0;
  double bound = 0.0;     // epsilon * |theta - theta'|
  double ratio = 0.0;     // w1 / bound (0 when bound == 0)
  double boot_se = 0.0;
  bool pass = false;
};

// Empirical check of the sensitivity inequality W1(D(theta), D(theta')) <=
// epsilon |theta - theta'| on 1-D projections of paired parameter settings.
std::vector<SensitivityRow> sensitivity_audit(
    const Environment& env,
    const std::vector<std::pair<ParamVector, ParamVector>>& theta_pairs,
    const SensitivityOptions& options, Rng& rng);

struct ConfidenceBand {
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

inline constexpr double kBandZ = 1.645;  // 90% coverage under Gaussian errors

// Pointwise mean and mean +- z s/sqrt(n) over >= 2 equal-length traces,
// with s the sample standard deviation across runs.
ConfidenceBand confidence_band(const std::vector<std::vector<double>>& traces,
                               double z = kBandZ);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values);

}  // namespace perfsim
