#include "perfsim/loss.hpp"

#include <cmath>

namespace perfsim {

double sigmoid(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log1p_exp(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double SquaredLoss::value(const Sample& z, const ParamVector& theta) const {
  const double r = z.features[0] - theta[0];
  return 0.5 * r * r;
}

ParamVector SquaredLoss::grad(const Sample& z, const ParamVector& theta) const {
  ParamVector g(1);
  g[0] = theta[0] - z.features[0];
  return g;
}

double AffineSquaredLoss::value(const Sample& z, const ParamVector& theta) const {
  const double pred = theta.head(m_).dot(z.features) + theta[m_];
  const double r = pred - *z.label;
  return 0.5 * r * r;
}

ParamVector AffineSquaredLoss::grad(const Sample& z, const ParamVector& theta) const {
  const double pred = theta.head(m_).dot(z.features) + theta[m_];
  const double r = pred - *z.label;
  ParamVector g(m_ + 1);
  g.head(m_) = r * z.features;
  g[m_] = r;
  return g;
}

LinearQuadraticLoss::LinearQuadraticLoss(double b, double c) : b_(b), c_(c) {
  if (!(b > 0.0)) throw std::invalid_argument("linear_quadratic: b must be > 0");
  if (c < 0.0) throw std::invalid_argument("linear_quadratic: c must be >= 0");
}

double LinearQuadraticLoss::value(const Sample& z, const ParamVector& theta) const {
  return -b_ * z.features[0] * theta[0] + 0.5 * c_ * theta[0] * theta[0];
}

ParamVector LinearQuadraticLoss::grad(const Sample& z, const ParamVector& theta) const {
  ParamVector g(1);
  g[0] = -b_ * z.features[0] + c_ * theta[0];
  return g;
}

RegularizedLogisticLoss::RegularizedLogisticLoss(Eigen::Index dim, double lambda)
    : d_(dim), lambda_(lambda) {
  if (dim < 1) throw std::invalid_argument("logistic: dim must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("logistic: lambda must be >= 0");
}

double RegularizedLogisticLoss::value(const Sample& z, const ParamVector& theta) const {
  const double t = z.features.dot(theta);
  return log1p_exp(t) - *z.label * t + 0.5 * lambda_ * theta.squaredNorm();
}

ParamVector RegularizedLogisticLoss::grad(const Sample& z, const ParamVector& theta) const {
  const double t = z.features.dot(theta);
  return (sigmoid(t) - *z.label) * z.features + lambda_ * theta;
}

}  // namespace perfsim
