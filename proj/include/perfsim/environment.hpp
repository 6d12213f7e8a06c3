#pragma once

#include <memory>
#include <optional>
#include <string>

#include "perfsim/loss.hpp"
#include "perfsim/rng.hpp"
#include "perfsim/types.hpp"

namespace perfsim {

struct EnvCapabilities {
  bool closed_form_population_gradient = false;
  bool closed_form_decoupled_minimizer = false;  // G(theta)
  bool closed_form_stable_point = false;
};

// A distribution map D(.): sampling given the deployed parameters, the loss
// the learner optimizes, declared constants, and whatever closed forms the
// environment has. Environments are immutable after construction and safe to
// share across concurrent runs; all randomness goes through caller-owned Rng
// streams, so equal (theta, rng state) pairs give bit-identical samples.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual const ProblemConstants& constants() const = 0;
  virtual const LossModel& loss() const = 0;
  virtual Eigen::Index param_dim() const = 0;
  virtual Eigen::Index sample_dim() const = 0;

  virtual Sample sample(const ParamVector& theta, Rng& rng) const = 0;

  virtual EnvCapabilities capabilities() const { return {}; }
  virtual const std::optional<Box>& constraint_box() const { return no_box_; }

  // E_{z ~ D(theta)} grad l(z; theta), when known in closed form.
  virtual std::optional<ParamVector> population_gradient_closed_form(
      const ParamVector& /*theta*/) const {
    return std::nullopt;
  }

  // G(theta) = argmin_{theta'} E_{z ~ D(theta)} l(z; theta'), closed form.
  virtual std::optional<ParamVector> decoupled_minimizer_closed_form(
      const ParamVector& /*theta*/) const {
    return std::nullopt;
  }

  virtual std::optional<ParamVector> stable_point_closed_form() const {
    return std::nullopt;
  }

  // G(theta) via the closed form or an environment-specific solver.
  virtual ParamVector decoupled_minimizer(const ParamVector& theta,
                                          double tol) const;

  // Initialization used by the experiment runner unless overridden: the risk
  // minimizer ignoring performative effects.
  virtual ParamVector default_init() const = 0;

 private:
  static const std::optional<Box> no_box_;
};

}  // namespace perfsim
