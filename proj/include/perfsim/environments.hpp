#pragma once

#include <memory>
#include <vector>

#include "perfsim/data.hpp"
#include "perfsim/environment.hpp"

namespace perfsim {

// D(theta) = N(mu + epsilon*theta, sigma^2) under squared loss.
// G(theta) = mu + epsilon*theta, stable point mu/(1 - epsilon).
class GaussianEnv final : public Environment {
 public:
  GaussianEnv(double mu, double sigma, double epsilon);

  std::string name() const override { return "gaussian"; }
  const ProblemConstants& constants() const override { return constants_; }
  const LossModel& loss() const override { return loss_; }
  Eigen::Index param_dim() const override { return 1; }
  Eigen::Index sample_dim() const override { return 1; }

  Sample sample(const ParamVector& theta, Rng& rng) const override;
  EnvCapabilities capabilities() const override { return {true, true, true}; }
  std::optional<ParamVector> population_gradient_closed_form(
      const ParamVector& theta) const override;
  std::optional<ParamVector> decoupled_minimizer_closed_form(
      const ParamVector& theta) const override;
  std::optional<ParamVector> stable_point_closed_form() const override;
  ParamVector default_init() const override;

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

 private:
  double mu_;
  double sigma_;
  ProblemConstants constants_;
  SquaredLoss loss_;
};

// Trip-duration prediction with a binary weather covariate:
//   x ~ Bernoulli(p),  y = mu + w*x - epsilon*(f_theta(x) - mu),
//   f_theta(x) = theta1*x + theta2,  squared loss.
// Parameters live in the box [0,w] x [0,2*mu]; the stable point is
// (w/(1+epsilon), mu). y is deterministic given x, so sigma_sq = 0 and
// L_sq = 4 hold exactly; gamma is the smallest eigenvalue of the expected
// design second moment [[p,p],[p,1]] and beta = 2 the largest per-sample one.
// The declared sensitivity is epsilon*sqrt(1+p^2), the tight W1 constant of
// the induced joint distribution (epsilon itself is not a valid constant:
// along dtheta = (1,1) the mean y shift is already (1+p)*epsilon/sqrt(2)).
class EtaEnv final : public Environment {
 public:
  EtaEnv(double p, double mu, double w, double epsilon);

  std::string name() const override { return "eta"; }
  const ProblemConstants& constants() const override { return constants_; }
  const LossModel& loss() const override { return loss_; }
  Eigen::Index param_dim() const override { return 2; }
  Eigen::Index sample_dim() const override { return 1; }

  Sample sample(const ParamVector& theta, Rng& rng) const override;
  EnvCapabilities capabilities() const override { return {true, true, true}; }
  const std::optional<Box>& constraint_box() const override { return box_; }
  std::optional<ParamVector> population_gradient_closed_form(
      const ParamVector& theta) const override;
  std::optional<ParamVector> decoupled_minimizer_closed_form(
      const ParamVector& theta) const override;
  std::optional<ParamVector> stable_point_closed_form() const override;
  ParamVector default_init() const override;

 private:
  double p_;
  double mu_;
  double w_;
  double eps_;  // feedback strength; constants_.epsilon carries the W1 bound
  ProblemConstants constants_;
  AffineSquaredLoss loss_{1};
  std::optional<Box> box_;
};

// Divergence counterexample: D(theta) a point mass at 1 + epsilon*theta with
// loss -beta_c*z*theta + (gamma_c/2)*theta^2. Strongly convex only for
// gamma_c > 0; the stable point beta_c/(gamma_c - epsilon*beta_c) exists when
// gamma_c > 0 and epsilon != gamma_c/beta_c.
class PointMassEnv final : public Environment {
 public:
  PointMassEnv(double epsilon, double beta_c, double gamma_c);

  std::string name() const override { return "point_mass"; }
  const ProblemConstants& constants() const override { return constants_; }
  const LossModel& loss() const override { return loss_; }
  Eigen::Index param_dim() const override { return 1; }
  Eigen::Index sample_dim() const override { return 1; }

  Sample sample(const ParamVector& theta, Rng& rng) const override;
  EnvCapabilities capabilities() const override;
  std::optional<ParamVector> population_gradient_closed_form(
      const ParamVector& theta) const override;
  std::optional<ParamVector> decoupled_minimizer_closed_form(
      const ParamVector& theta) const override;
  std::optional<ParamVector> stable_point_closed_form() const override;
  ParamVector default_init() const override;

 private:
  ProblemConstants constants_;
  LinearQuadraticLoss loss_;
};

// Agents move their strategic features to x - epsilon*theta (the maximizer of
// the linear utility -theta.x' minus the quadratic cost |x'-x|^2/(2 epsilon));
// everything else, including the label, stays put.
Eigen::VectorXd best_response(const Eigen::VectorXd& x, const ParamVector& theta,
                              double epsilon,
                              const std::vector<Eigen::Index>& strategic_dims);

// gamma = lambda, beta = max{2, (1/4n) sum |x_i|^2 + gamma}, L_sq = beta^2.
ProblemConstants compute_logistic_constants(const Dataset& data, double lambda);

// Credit-scoring simulator: draw (x, y) uniformly from the preprocessed
// dataset (treated as the true base distribution), replace the strategic
// coordinates by the best response to the deployed classifier, keep the
// label. The learner's loss is L2-regularized logistic regression.
class StrategicEnv final : public Environment {
 public:
  StrategicEnv(std::shared_ptr<const Dataset> data, double epsilon,
               std::vector<Eigen::Index> strategic_dims, double lambda);

  std::string name() const override { return "strategic"; }
  const ProblemConstants& constants() const override { return constants_; }
  const LossModel& loss() const override { return loss_; }
  Eigen::Index param_dim() const override { return data_->d(); }
  Eigen::Index sample_dim() const override { return data_->d(); }

  Sample sample(const ParamVector& theta, Rng& rng) const override;
  EnvCapabilities capabilities() const override { return {}; }

  // Full-batch gradient descent with constant step 1/beta on the
  // best-responded dataset, stopping at gradient norm < tol.
  ParamVector decoupled_minimizer(const ParamVector& theta,
                                  double tol) const override;
  ParamVector default_init() const override { return base_minimizer_; }

  const Dataset& data() const { return *data_; }
  const std::vector<Eigen::Index>& strategic_dims() const {
    return strategic_dims_;
  }
  double lambda() const { return loss_.lambda(); }
  const ParamVector& base_minimizer() const { return base_minimizer_; }

 private:
  ParamVector batch_minimizer(const Eigen::MatrixXd& features, double tol,
                              std::int64_t max_iters) const;

  std::shared_ptr<const Dataset> data_;
  double epsilon_;
  std::vector<Eigen::Index> strategic_dims_;
  RegularizedLogisticLoss loss_;
  ProblemConstants constants_;
  ParamVector base_minimizer_;
};

}  // namespace perfsim
