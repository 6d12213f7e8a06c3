#pragma once

#include <memory>
#include <string>

#include "perfsim/types.hpp"

namespace perfsim {

// Per-sample loss value and gradient. Gradients are always taken with
// respect to the parameters.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual double value(const Sample& z, const ParamVector& theta) const = 0;
  virtual ParamVector grad(const Sample& z, const ParamVector& theta) const = 0;

  virtual Eigen::Index param_dim() const = 0;
  virtual Eigen::Index feature_dim() const = 0;
  virtual bool needs_label() const = 0;
  virtual std::string name() const = 0;
};

// l(z; theta) = 1/2 (z - theta)^2 on scalar instances.
class SquaredLoss final : public LossModel {
 public:
  double value(const Sample& z, const ParamVector& theta) const override;
  ParamVector grad(const Sample& z, const ParamVector& theta) const override;
  Eigen::Index param_dim() const override { return 1; }
  Eigen::Index feature_dim() const override { return 1; }
  bool needs_label() const override { return false; }
  std::string name() const override { return "squared"; }
};

// Linear model with intercept under squared loss:
//   prediction = theta[0..m-1] . x + theta[m],  l = 1/2 (prediction - y)^2.
class AffineSquaredLoss final : public LossModel {
 public:
  explicit AffineSquaredLoss(Eigen::Index n_features) : m_(n_features) {}

  double value(const Sample& z, const ParamVector& theta) const override;
  ParamVector grad(const Sample& z, const ParamVector& theta) const override;
  Eigen::Index param_dim() const override { return m_ + 1; }
  Eigen::Index feature_dim() const override { return m_; }
  bool needs_label() const override { return true; }
  std::string name() const override { return "affine_squared"; }

 private:
  Eigen::Index m_;
};

// l(z; theta) = -b z theta + (c/2) theta^2 on scalars. Convex for c >= 0,
// strongly convex only for c > 0.
class LinearQuadraticLoss final : public LossModel {
 public:
  LinearQuadraticLoss(double b, double c);

  double value(const Sample& z, const ParamVector& theta) const override;
  ParamVector grad(const Sample& z, const ParamVector& theta) const override;
  Eigen::Index param_dim() const override { return 1; }
  Eigen::Index feature_dim() const override { return 1; }
  bool needs_label() const override { return false; }
  std::string name() const override { return "linear_quadratic"; }

  double b() const { return b_; }
  double c() const { return c_; }

 private:
  double b_;
  double c_;
};

// l((x,y); theta) = log(1 + exp(x.theta)) - y x.theta + (lambda/2) |theta|^2
// with y in {0,1}.
class RegularizedLogisticLoss final : public LossModel {
 public:
  RegularizedLogisticLoss(Eigen::Index dim, double lambda);

  double value(const Sample& z, const ParamVector& theta) const override;
  ParamVector grad(const Sample& z, const ParamVector& theta) const override;
  Eigen::Index param_dim() const override { return d_; }
  Eigen::Index feature_dim() const override { return d_; }
  bool needs_label() const override { return true; }
  std::string name() const override { return "regularized_logistic"; }

  double lambda() const { return lambda_; }

 private:
  Eigen::Index d_;
  double lambda_;
};

double sigmoid(double t);
double log1p_exp(double t);

}  // namespace perfsim
