#include "perfsim/core_ops.hpp"

#include <sstream>

namespace perfsim {

const std::optional<Box> Environment::no_box_{};

ParamVector Environment::decoupled_minimizer(const ParamVector& theta,
                                             double /*tol*/) const {
  if (auto g = decoupled_minimizer_closed_form(theta)) return *g;
  throw std::logic_error(name() +
                         ": no closed-form decoupled minimizer and no solver");
}

ParamVector loss_grad(const LossModel& loss, const Sample& z,
                      const ParamVector& theta) {
  if (theta.size() != loss.param_dim()) {
    std::ostringstream msg;
    msg << "loss_grad: parameter dimension " << theta.size() << " != "
        << loss.param_dim() << " expected by " << loss.name();
    throw std::invalid_argument(msg.str());
  }
  if (z.features.size() != loss.feature_dim()) {
    std::ostringstream msg;
    msg << "loss_grad: feature dimension " << z.features.size() << " != "
        << loss.feature_dim() << " expected by " << loss.name();
    throw std::invalid_argument(msg.str());
  }
  if (loss.needs_label() && !z.label.has_value())
    throw std::invalid_argument("loss_grad: " + loss.name() +
                                " requires a labeled sample");
  ParamVector g = loss.grad(z, theta);
  if (!g.allFinite())
    throw std::domain_error("loss_grad: non-finite gradient entries");
  return g;
}

ParamVector population_gradient(const Environment& env, const ParamVector& theta,
                                std::int64_t mc_samples, Rng* rng) {
  if (auto g = env.population_gradient_closed_form(theta)) return *g;
  if (mc_samples < 1)
    throw std::invalid_argument("population_gradient: mc_samples must be >= 1");
  if (rng == nullptr)
    throw std::invalid_argument("population_gradient: rng required for Monte Carlo");
  ParamVector acc = ParamVector::Zero(env.param_dim());
  for (std::int64_t i = 0; i < mc_samples; ++i) {
    const Sample z = env.sample(theta, *rng);
    acc += loss_grad(env.loss(), z, theta);
  }
  return acc / static_cast<double>(mc_samples);
}

double performative_risk(const Environment& env, const ParamVector& theta,
                         std::int64_t mc_samples, Rng& rng) {
  if (mc_samples < 1)
    throw std::invalid_argument("performative_risk: mc_samples must be >= 1");
  double acc = 0.0;
  for (std::int64_t i = 0; i < mc_samples; ++i) {
    const Sample z = env.sample(theta, rng);
    acc += env.loss().value(z, theta);
  }
  return acc / static_cast<double>(mc_samples);
}

ParamVector project(const ParamVector& theta, const std::optional<Box>& box) {
  if (!box) return theta;
  if (box->lo.size() != theta.size())
    throw std::invalid_argument("project: box dimension mismatch");
  return theta.cwiseMax(box->lo).cwiseMin(box->hi);
}

}  // namespace perfsim
