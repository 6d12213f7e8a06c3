#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perfsim {

using ParamVector = Eigen::VectorXd;

// One instance z drawn from a distribution map. The feature layout is
// environment-defined; the label is absent for unsupervised instances.
struct Sample {
  Eigen::VectorXd features;
  std::optional<double> label;
};

// Environment-declared problem constants: joint smoothness beta, strong
// convexity gamma, gradient second-moment constants (sigma_sq, L_sq) and the
// sensitivity epsilon of the distribution map.
struct ProblemConstants {
  double epsilon = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double sigma_sq = 0.0;
  double L_sq = 0.0;

  double sigma() const { return std::sqrt(sigma_sq); }

  // A unique stable point is guaranteed iff epsilon < gamma/beta.
  bool in_convergence_regime() const {
    return gamma > 0.0 && epsilon < gamma / beta;
  }

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("constants: beta must be > 0");
    if (gamma < 0.0) throw std::invalid_argument("constants: gamma must be >= 0");
    if (gamma > 0.0 && beta < gamma)
      throw std::invalid_argument("constants: beta >= gamma required");
    if (epsilon < 0.0) throw std::invalid_argument("constants: epsilon must be >= 0");
    if (sigma_sq < 0.0) throw std::invalid_argument("constants: sigma_sq must be >= 0");
    if (L_sq < 0.0) throw std::invalid_argument("constants: L_sq must be >= 0");
  }
};

// Axis-aligned box constraint set.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box validated(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size())
      throw std::invalid_argument("box: bound dimensions differ");
    if (lo.size() == 0) throw std::invalid_argument("box: empty bounds");
    if ((lo.array() > hi.array()).any())
      throw std::invalid_argument("box: lo > hi, box is empty");
    return Box{std::move(lo), std::move(hi)};
  }

  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

enum class RunStatus { ok, diverged };

inline const char* to_string(RunStatus s) {
  return s == RunStatus::ok ? "ok" : "diverged";
}

struct TrajectoryRecord {
  std::int64_t step = 0;
  std::int64_t samples = 0;
  std::int64_t deployments = 0;
  ParamVector theta;
  std::optional<double> dist_sq;
  std::optional<double> perf_risk;
};

// Time-indexed record of a single optimization run. samples and deployments
// are nondecreasing in step; greedy deploy keeps them equal.
struct Trajectory {
  std::vector<TrajectoryRecord> records;
  RunStatus status = RunStatus::ok;
  std::int64_t total_steps = 0;
  std::int64_t total_samples = 0;
  std::int64_t total_deployments = 0;
  ParamVector final_theta;
};

// Thrown when a theorem-derived quantity is requested outside its regime
// (epsilon >= gamma/beta).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace perfsim
