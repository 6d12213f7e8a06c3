#pragma once

#include "perfsim/environment.hpp"

namespace perfsim {

// grad l(z; theta) with dimension and finiteness checks.
ParamVector loss_grad(const LossModel& loss, const Sample& z,
                      const ParamVector& theta);

// E_{z ~ D(theta)} grad l(z; theta): exact when the environment has the
// closed form (mc_samples and rng ignored), else a Monte-Carlo mean over
// mc_samples fresh draws.
ParamVector population_gradient(const Environment& env, const ParamVector& theta,
                                std::int64_t mc_samples, Rng* rng);

// Monte-Carlo estimate of PR(theta) = E_{z ~ D(theta)} l(z; theta).
double performative_risk(const Environment& env, const ParamVector& theta,
                         std::int64_t mc_samples, Rng& rng);

// Euclidean projection onto the box; identity when no box is given.
ParamVector project(const ParamVector& theta, const std::optional<Box>& box);

}  // namespace perfsim
