#include "perfsim/environments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perfsim {

GaussianEnv::GaussianEnv(double mu, double sigma, double epsilon) : mu_(mu), sigma_(sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian: sigma must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("gaussian: epsilon in [0,1) required");
  // Forced by the squared loss: beta = gamma = 1, L^2 = 1, A3 noise = sigma^2.
  constants_ = ProblemConstants{epsilon, 1.0, 1.0, sigma * sigma, 1.0};
  constants_.validate();
}

Sample GaussianEnv::sample(const ParamVector& theta, Rng& rng) const {
  Sample z;
  z.features.resize(1);
  z.features[0] = rng.normal(mu_ + constants_.epsilon * theta[0], sigma_);
  return z;
}

std::optional<ParamVector> GaussianEnv::population_gradient_closed_form(
    const ParamVector& theta) const {
  ParamVector g(1);
  g[0] = (1.0 - constants_.epsilon) * theta[0] - mu_;
  return g;
}

std::optional<ParamVector> GaussianEnv::decoupled_minimizer_closed_form(
    const ParamVector& theta) const {
  ParamVector g(1);
  g[0] = mu_ + constants_.epsilon * theta[0];
  return g;
}

std::optional<ParamVector> GaussianEnv::stable_point_closed_form() const {
  ParamVector v(1);
  v[0] = mu_ / (1.0 - constants_.epsilon);
  return v;
}

ParamVector GaussianEnv::default_init() const {
  ParamVector v(1);
  v[0] = mu_;
  return v;
}

EtaEnv::EtaEnv(double p, double mu, double w, double epsilon)
    : p_(p), mu_(mu), w_(w), eps_(epsilon) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("eta: p in (0,1) required");
  if (!(mu > 0.0)) throw std::invalid_argument("eta: mu must be > 0");
  if (!(w > 0.0)) throw std::invalid_argument("eta: w must be > 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("eta: epsilon in [0,1) required");
  const double gamma =
      0.5 * ((1.0 + p) - std::sqrt((1.0 - p) * (1.0 - p) + 4.0 * p * p));
  // The y shift between D(theta) and D(theta') is eps*(dtheta1*x + dtheta2),
  // so the tight W1 sensitivity of the joint sample is eps*sqrt(1 + p^2)
  // (worst direction of dtheta), not the feedback strength eps itself.
  constants_ =
      ProblemConstants{epsilon * std::sqrt(1.0 + p * p), 2.0, gamma, 0.0, 4.0};
  constants_.validate();
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd hi(2);
  hi << w, 2.0 * mu;
  box_ = Box::validated(std::move(lo), std::move(hi));
}

Sample EtaEnv::sample(const ParamVector& theta, Rng& rng) const {
  if (!box_->contains(theta))
    throw std::domain_error("eta: theta outside the parameter box");
  const double x = rng.bernoulli(p_) ? 1.0 : 0.0;
  const double f = theta[0] * x + theta[1];
  Sample z;
  z.features.resize(1);
  z.features[0] = x;
  z.label = mu_ + w_ * x - eps_ * (f - mu_);
  return z;
}

std::optional<ParamVector> EtaEnv::population_gradient_closed_form(
    const ParamVector& theta) const {
  const double eps = eps_;
  // Residual of f_theta against the induced outcome, at x = 0 and x = 1.
  const double r0 = (1.0 + eps) * (theta[1] - mu_);
  const double r1 = (1.0 + eps) * (theta[0] + theta[1] - mu_) - w_;
  ParamVector g(2);
  g[0] = p_ * r1;
  g[1] = p_ * r1 + (1.0 - p_) * r0;
  return g;
}

std::optional<ParamVector> EtaEnv::decoupled_minimizer_closed_form(
    const ParamVector& theta) const {
  // y is an exact affine function of x, so the least-squares fit is exact:
  // slope w - eps*theta1, intercept mu - eps*(theta2 - mu).
  const double eps = eps_;
  ParamVector g(2);
  g[0] = w_ - eps * theta[0];
  g[1] = mu_ - eps * (theta[1] - mu_);
  return g;
}

std::optional<ParamVector> EtaEnv::stable_point_closed_form() const {
  ParamVector v(2);
  v << w_ / (1.0 + eps_), mu_;
  return v;
}

ParamVector EtaEnv::default_init() const {
  ParamVector v(2);
  v << w_, mu_;
  return v;
}

PointMassEnv::PointMassEnv(double epsilon, double beta_c, double gamma_c)
    : loss_(beta_c, gamma_c) {
  if (epsilon < 0.0) throw std::invalid_argument("point_mass: epsilon must be >= 0");
  constants_ = ProblemConstants{epsilon, std::max(beta_c, gamma_c), gamma_c, 0.0,
                                gamma_c * gamma_c};
  constants_.validate();
}

Sample PointMassEnv::sample(const ParamVector& theta, Rng& /*rng*/) const {
  Sample z;
  z.features.resize(1);
  z.features[0] = 1.0 + constants_.epsilon * theta[0];
  return z;
}

EnvCapabilities PointMassEnv::capabilities() const {
  const bool has_g = loss_.c() > 0.0;
  const bool has_ps =
      has_g && constants_.epsilon * loss_.b() != loss_.c();
  return {true, has_g, has_ps};
}

std::optional<ParamVector> PointMassEnv::population_gradient_closed_form(
    const ParamVector& theta) const {
  ParamVector g(1);
  g[0] = (loss_.c() - constants_.epsilon * loss_.b()) * theta[0] - loss_.b();
  return g;
}

std::optional<ParamVector> PointMassEnv::decoupled_minimizer_closed_form(
    const ParamVector& theta) const {
  if (loss_.c() <= 0.0) return std::nullopt;
  ParamVector g(1);
  g[0] = loss_.b() * (1.0 + constants_.epsilon * theta[0]) / loss_.c();
  return g;
}

std::optional<ParamVector> PointMassEnv::stable_point_closed_form() const {
  const double denom = loss_.c() - constants_.epsilon * loss_.b();
  if (loss_.c() <= 0.0 || denom == 0.0) return std::nullopt;
  ParamVector v(1);
  v[0] = loss_.b() / denom;
  return v;
}

ParamVector PointMassEnv::default_init() const {
  ParamVector v(1);
  v[0] = loss_.c() > 0.0 ? loss_.b() / loss_.c() : 0.0;
  return v;
}

Eigen::VectorXd best_response(const Eigen::VectorXd& x, const ParamVector& theta,
                              double epsilon,
                              const std::vector<Eigen::Index>& strategic_dims) {
  if (x.size() != theta.size())
    throw std::invalid_argument("best_response: dimension mismatch");
  if (epsilon < 0.0)
    throw std::invalid_argument("best_response: epsilon must be >= 0");
  Eigen::VectorXd out = x;
  for (const Eigen::Index j : strategic_dims) {
    if (j < 0 || j >= x.size())
      throw std::invalid_argument("best_response: strategic index out of range");
    out[j] -= epsilon * theta[j];
  }
  return out;
}

ProblemConstants compute_logistic_constants(const Dataset& data, double lambda) {
  if (data.n() < 1) throw std::invalid_argument("logistic constants: empty dataset");
  const double mean_sq_norm =
      data.features.rowwise().squaredNorm().mean();
  const double gamma = lambda;
  const double beta = std::max(2.0, 0.25 * mean_sq_norm + gamma);
  ProblemConstants c{0.0, beta, gamma, 0.0, beta * beta};
  c.validate();
  return c;
}

StrategicEnv::StrategicEnv(std::shared_ptr<const Dataset> data, double epsilon,
                           std::vector<Eigen::Index> strategic_dims, double lambda)
    : data_(std::move(data)),
      epsilon_(epsilon),
      strategic_dims_(std::move(strategic_dims)),
      loss_(data_ ? data_->d() : 1, lambda) {
  if (!data_ || data_->n() == 0)
    throw std::invalid_argument("strategic: empty dataset");
  if (epsilon < 0.0) throw std::invalid_argument("strategic: epsilon must be >= 0");
  for (const Eigen::Index j : strategic_dims_)
    if (j < 0 || j >= data_->d())
      throw std::invalid_argument("strategic: strategic dim out of range");
  for (Eigen::Index i = 0; i < data_->n(); ++i)
    if (data_->labels[i] != 0.0 && data_->labels[i] != 1.0)
      throw std::invalid_argument("strategic: labels must be in {0, 1}");

  constants_ = compute_logistic_constants(*data_, lambda);
  constants_.epsilon = epsilon;
  base_minimizer_ = batch_minimizer(data_->features, 1e-11, 1000000);
  // Declared noise level: gradient second moment on the base distribution at
  // the base minimizer.
  double acc = 0.0;
  Sample z;
  for (Eigen::Index i = 0; i < data_->n(); ++i) {
    z.features = data_->features.row(i);
    z.label = data_->labels[i];
    acc += loss_.grad(z, base_minimizer_).squaredNorm();
  }
  constants_.sigma_sq = acc / static_cast<double>(data_->n());
}

Sample StrategicEnv::sample(const ParamVector& theta, Rng& rng) const {
  const Eigen::Index i = static_cast<Eigen::Index>(
      rng.uniform_index(static_cast<std::uint64_t>(data_->n())));
  Sample z;
  z.features = best_response(data_->features.row(i), theta, epsilon_, strategic_dims_);
  z.label = data_->labels[i];
  return z;
}

ParamVector StrategicEnv::decoupled_minimizer(const ParamVector& theta,
                                              double tol) const {
  // The best response shifts every row by the same vector, so the induced
  // dataset is the base matrix with the strategic columns offset by
  // -epsilon * theta_S.
  Eigen::MatrixXd shifted = data_->features;
  for (const Eigen::Index j : strategic_dims_)
    shifted.col(j).array() -= epsilon_ * theta[j];
  return batch_minimizer(shifted, tol, 1000000);
}

ParamVector StrategicEnv::batch_minimizer(const Eigen::MatrixXd& features,
                                          double tol, std::int64_t max_iters) const {
  // Always starts from zero: G(theta) must be a pure function of theta,
  // independent of call history, for reproducible fixed points.
  const Eigen::Index n = features.rows();
  const double lambda = loss_.lambda();
  const double beta_step =
      std::max(2.0, 0.25 * features.rowwise().squaredNorm().mean() + lambda);
  const double step = 1.0 / beta_step;

  ParamVector theta = ParamVector::Zero(features.cols());
  Eigen::VectorXd margins(n), probs(n);
  double grad_norm = 0.0;
  for (std::int64_t it = 0; it < max_iters; ++it) {
    margins.noalias() = features * theta;
    for (Eigen::Index i = 0; i < n; ++i) probs[i] = sigmoid(margins[i]);
    ParamVector grad =
        features.transpose() * (probs - data_->labels) / static_cast<double>(n) +
        lambda * theta;
    grad_norm = grad.norm();
    if (grad_norm < tol) return theta;
    theta -= step * grad;
  }
  std::ostringstream msg;
  msg << "strategic: batch solver did not reach tol " << tol << " in "
      << max_iters << " iterations (residual " << grad_norm << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace perfsim
