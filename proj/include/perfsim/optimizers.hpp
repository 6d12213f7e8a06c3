#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "perfsim/core_ops.hpp"

namespace perfsim {

// eta_k = ((gamma - eps*beta)k + 8L^2/(gamma - eps*beta))^{-1}, k >= 1.
// Only valid inside the convergence regime; outside it the caller should
// switch to the empirical override schedule.
double greedy_step_size(std::int64_t k, const ProblemConstants& c);

// eta_j = (gamma j + 8L^2/gamma)^{-1}, j >= 1; independent of the outer
// round and of epsilon.
double lazy_step_size(std::int64_t j, const ProblemConstants& c);

// Step-size sequences indexed from 1; strictly positive and nonincreasing.
class StepSchedule {
 public:
  enum class Variant { greedy_theorem, lazy_theorem, constant, override_decay };

  static StepSchedule greedy_theorem(const ProblemConstants& c);
  static StepSchedule lazy_theorem(const ProblemConstants& c);
  static StepSchedule constant(double eta);
  // eta_k = c_eta / (k + k0).
  static StepSchedule override_decay(double c_eta, double k0);
  // Empirical override used outside the provable regime:
  // c_eta = 100/gamma, k0 = 8L^2/gamma^2.
  static StepSchedule override_empirical(const ProblemConstants& c);

  double at(std::int64_t k) const;
  Variant variant() const { return variant_; }
  double c_eta() const { return c_eta_; }
  double k0() const { return k0_; }

 private:
  StepSchedule(Variant v, double c_eta, double k0, ProblemConstants constants)
      : variant_(v), c_eta_(c_eta), k0_(k0), constants_(constants) {}

  Variant variant_;
  double c_eta_ = 0.0;
  double k0_ = 0.0;
  ProblemConstants constants_{};
};

const char* to_string(StepSchedule::Variant v);

// n(k) = ceil(n0 * k^alpha), clamped to >= 1; nondecreasing for alpha >= 0.
struct DeploymentSchedule {
  double n0 = 1.0;
  double alpha = 1.0;

  DeploymentSchedule(double n0_, double alpha_) : n0(n0_), alpha(alpha_) {
    if (!(n0 >= 1.0))
      throw std::invalid_argument("deployment schedule: n0 must be >= 1");
    if (alpha < 0.0)
      throw std::invalid_argument("deployment schedule: alpha must be >= 0");
  }

  std::int64_t n(std::int64_t k) const {
    const double v = n0 * std::pow(static_cast<double>(k), alpha);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
  }
};

// What to record along a run. Checkpoints are sample counts for the SGD
// variants and iteration indices for rgd/rrm; the initial state (index 0)
// and the final state are always recorded.
struct RecordOptions {
  std::vector<std::int64_t> checkpoints;
  bool record_deployments = false;
  std::optional<ParamVector> stable_ref;
  std::int64_t perf_risk_samples = 0;
  Rng* risk_rng = nullptr;
  double divergence_norm = 1e12;
};

// Geometric grid of ~points distinct integers covering [1, budget].
std::vector<std::int64_t> geometric_checkpoints(std::int64_t budget,
                                                int points);

// Observe z ~ D(theta_k), step along grad l(z; theta_k), project, deploy.
Trajectory greedy_deploy(const Environment& env, const ParamVector& theta1,
                         std::int64_t total_steps, const StepSchedule& steps,
                         const RecordOptions& rec, Rng& rng);

struct LazyBudget {
  std::int64_t max_deployments = 0;  // 0 = unbounded
  std::int64_t max_samples = 0;      // 0 = unbounded
};

// Between deployments k and k+1, take n(k) inner steps on samples drawn from
// the last deployed model; deploy the final inner iterate. Inner step sizes
// restart at j = 1 each round.
Trajectory lazy_deploy(const Environment& env, const ParamVector& theta1,
                       const LazyBudget& budget, const DeploymentSchedule& dep,
                       const StepSchedule& steps, const RecordOptions& rec,
                       Rng& rng);

// Repeated gradient descent on exact population gradients (closed form when
// available, else Monte Carlo with mc_samples draws per step). Divergence is
// recorded in the trajectory status, not raised.
Trajectory rgd(const Environment& env, const ParamVector& theta1, double eta,
               std::int64_t num_steps, std::int64_t mc_samples,
               const RecordOptions& rec, Rng* rng);

// Repeated risk minimization: theta_{k+1} = G(theta_k), each round solved to
// inner_tol by the environment's closed form or solver.
Trajectory rrm(const Environment& env, const ParamVector& theta1,
               std::int64_t num_rounds, double inner_tol,
               const RecordOptions& rec);

// RRM fixed point: iterate until |theta_{k+1} - theta_k| < tol. Throws if
// max_rounds is exhausted.
ParamVector empirical_stable_point(const Environment& env,
                                   const ParamVector& theta1, double tol,
                                   std::int64_t max_rounds = 10000,
                                   double inner_tol = 1e-12);

}  // namespace perfsim
