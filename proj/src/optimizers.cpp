#include "perfsim/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perfsim {

double greedy_step_size(std::int64_t k, const ProblemConstants& c) {
  if (k < 1) throw std::invalid_argument("greedy_step_size: k must be >= 1");
  if (!c.in_convergence_regime()) {
    std::ostringstream msg;
    msg << "greedy step size undefined outside the convergence regime "
        << "(epsilon = " << c.epsilon << " >= gamma/beta = " << c.gamma / c.beta
        << "); use the empirical override schedule";
    throw RegimeError(msg.str());
  }
  const double eff = c.gamma - c.epsilon * c.beta;
  return 1.0 / (eff * static_cast<double>(k) + 8.0 * c.L_sq / eff);
}

double lazy_step_size(std::int64_t j, const ProblemConstants& c) {
  if (j < 1) throw std::invalid_argument("lazy_step_size: j must be >= 1");
  if (!(c.gamma > 0.0))
    throw std::invalid_argument("lazy_step_size: gamma must be > 0");
  return 1.0 / (c.gamma * static_cast<double>(j) + 8.0 * c.L_sq / c.gamma);
}

StepSchedule StepSchedule::greedy_theorem(const ProblemConstants& c) {
  greedy_step_size(1, c);  // regime check
  const double eff = c.gamma - c.epsilon * c.beta;
  return StepSchedule(Variant::greedy_theorem, 1.0 / eff,
                      8.0 * c.L_sq / (eff * eff), c);
}

StepSchedule StepSchedule::lazy_theorem(const ProblemConstants& c) {
  lazy_step_size(1, c);
  return StepSchedule(Variant::lazy_theorem, 1.0 / c.gamma,
                      8.0 * c.L_sq / (c.gamma * c.gamma), c);
}

StepSchedule StepSchedule::constant(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("step schedule: eta must be > 0");
  return StepSchedule(Variant::constant, eta, 0.0, {});
}

StepSchedule StepSchedule::override_decay(double c_eta, double k0) {
  if (!(c_eta > 0.0)) throw std::invalid_argument("step schedule: c_eta must be > 0");
  if (k0 < 0.0) throw std::invalid_argument("step schedule: k0 must be >= 0");
  return StepSchedule(Variant::override_decay, c_eta, k0, {});
}

StepSchedule StepSchedule::override_empirical(const ProblemConstants& c) {
  if (!(c.gamma > 0.0))
    throw std::invalid_argument("override schedule: gamma must be > 0");
  return override_decay(100.0 / c.gamma, 8.0 * c.L_sq / (c.gamma * c.gamma));
}

double StepSchedule::at(std::int64_t k) const {
  if (k < 1) throw std::invalid_argument("step schedule: index must be >= 1");
  switch (variant_) {
    case Variant::greedy_theorem:
      return greedy_step_size(k, constants_);
    case Variant::lazy_theorem:
      return lazy_step_size(k, constants_);
    case Variant::constant:
      return c_eta_;
    case Variant::override_decay:
      return c_eta_ / (static_cast<double>(k) + k0_);
  }
  throw std::logic_error("step schedule: unreachable");
}

const char* to_string(StepSchedule::Variant v) {
  switch (v) {
    case StepSchedule::Variant::greedy_theorem: return "greedy_theorem";
    case StepSchedule::Variant::lazy_theorem: return "lazy_theorem";
    case StepSchedule::Variant::constant: return "constant";
    case StepSchedule::Variant::override_decay: return "override";
  }
  return "?";
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t budget, int points) {
  if (budget < 1) throw std::invalid_argument("checkpoints: budget must be >= 1");
  if (points < 1) throw std::invalid_argument("checkpoints: points must be >= 1");
  std::vector<std::int64_t> out;
  const double lb = std::log(static_cast<double>(budget));
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    const auto v = static_cast<std::int64_t>(std::llround(std::exp(lb * t)));
    out.push_back(std::clamp<std::int64_t>(v, 1, budget));
  }
  out.push_back(budget);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

class Recorder {
 public:
  Recorder(const Environment& env, const RecordOptions& rec, Trajectory& out)
      : env_(env), rec_(rec), out_(out) {
    if (rec_.perf_risk_samples > 0 && rec_.risk_rng == nullptr)
      throw std::invalid_argument("record options: risk_rng required when "
                                  "perf_risk_samples > 0");
    if (!std::is_sorted(rec_.checkpoints.begin(), rec_.checkpoints.end()))
      throw std::invalid_argument("record options: checkpoints must be sorted");
  }

  // True when `value` equals the next pending checkpoint.
  bool due(std::int64_t value) {
    while (next_ < rec_.checkpoints.size() && rec_.checkpoints[next_] < value)
      ++next_;
    if (next_ < rec_.checkpoints.size() && rec_.checkpoints[next_] == value) {
      ++next_;
      return true;
    }
    return false;
  }

  void record(std::int64_t step, std::int64_t samples, std::int64_t deployments,
              const ParamVector& theta) {
    if (!out_.records.empty()) {
      const auto& last = out_.records.back();
      if (last.step == step && last.samples == samples &&
          last.deployments == deployments)
        return;
    }
    TrajectoryRecord r;
    r.step = step;
    r.samples = samples;
    r.deployments = deployments;
    r.theta = theta;
    if (rec_.stable_ref)
      r.dist_sq = (theta - *rec_.stable_ref).squaredNorm();
    if (rec_.perf_risk_samples > 0)
      r.perf_risk =
          performative_risk(env_, theta, rec_.perf_risk_samples, *rec_.risk_rng);
    out_.records.push_back(std::move(r));
  }

  bool diverged(const ParamVector& theta) const {
    return !theta.allFinite() || theta.norm() > rec_.divergence_norm;
  }

 private:
  const Environment& env_;
  const RecordOptions& rec_;
  Trajectory& out_;
  std::size_t next_ = 0;
};

void finish(Trajectory& out, Recorder& rec, std::int64_t step,
            std::int64_t samples, std::int64_t deployments,
            const ParamVector& theta) {
  rec.record(step, samples, deployments, theta);
  out.total_steps = step;
  out.total_samples = samples;
  out.total_deployments = deployments;
  out.final_theta = theta;
}

}  // namespace

Trajectory greedy_deploy(const Environment& env, const ParamVector& theta1,
                         std::int64_t total_steps, const StepSchedule& steps,
                         const RecordOptions& rec, Rng& rng) {
  if (total_steps < 1)
    throw std::invalid_argument("greedy_deploy: total_steps must be >= 1");
  const auto& box = env.constraint_box();
  Trajectory out;
  Recorder recorder(env, rec, out);
  ParamVector theta = project(theta1, box);
  recorder.record(0, 0, 0, theta);

  std::int64_t k = 0;
  while (k < total_steps) {
    ++k;
    const Sample z = env.sample(theta, rng);
    const ParamVector g = loss_grad(env.loss(), z, theta);
    theta = project(theta - steps.at(k) * g, box);
    if (recorder.diverged(theta)) {
      out.status = RunStatus::diverged;
      break;
    }
    if (recorder.due(k)) recorder.record(k, k, k, theta);
  }
  finish(out, recorder, k, k, k, theta);
  return out;
}

Trajectory lazy_deploy(const Environment& env, const ParamVector& theta1,
                       const LazyBudget& budget, const DeploymentSchedule& dep,
                       const StepSchedule& steps, const RecordOptions& rec,
                       Rng& rng) {
  if (budget.max_deployments <= 0 && budget.max_samples <= 0)
    throw std::invalid_argument("lazy_deploy: a positive budget is required");
  const auto& box = env.constraint_box();
  Trajectory out;
  Recorder recorder(env, rec, out);
  ParamVector theta = project(theta1, box);
  recorder.record(0, 0, 0, theta);

  std::int64_t samples = 0, step = 0, deployments = 0;
  std::int64_t k = 0;
  while ((budget.max_deployments <= 0 || k < budget.max_deployments) &&
         (budget.max_samples <= 0 || samples < budget.max_samples)) {
    ++k;
    std::int64_t nk = dep.n(k);
    if (budget.max_samples > 0)
      nk = std::min(nk, budget.max_samples - samples);
    ParamVector phi = theta;
    for (std::int64_t j = 1; j <= nk; ++j) {
      const Sample z = env.sample(theta, rng);  // last deployed model
      const ParamVector g = loss_grad(env.loss(), z, phi);
      phi = project(phi - steps.at(j) * g, box);
      ++samples;
      ++step;
      if (recorder.diverged(phi)) {
        out.status = RunStatus::diverged;
        finish(out, recorder, step, samples, deployments, phi);
        return out;
      }
      if (recorder.due(samples)) recorder.record(step, samples, deployments, phi);
    }
    theta = phi;
    deployments = k;
    if (rec.record_deployments) recorder.record(step, samples, deployments, theta);
  }
  finish(out, recorder, step, samples, deployments, theta);
  return out;
}

Trajectory rgd(const Environment& env, const ParamVector& theta1, double eta,
               std::int64_t num_steps, std::int64_t mc_samples,
               const RecordOptions& rec, Rng* rng) {
  if (num_steps < 1) throw std::invalid_argument("rgd: num_steps must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("rgd: eta must be > 0");
  const bool closed = env.capabilities().closed_form_population_gradient;
  const auto& box = env.constraint_box();
  Trajectory out;
  Recorder recorder(env, rec, out);
  ParamVector theta = project(theta1, box);
  recorder.record(0, 0, 0, theta);

  std::int64_t samples = 0;
  std::int64_t k = 0;
  while (k < num_steps) {
    ++k;
    const ParamVector g = population_gradient(env, theta, mc_samples, rng);
    theta = project(theta - eta * g, box);
    if (!closed) samples += mc_samples;
    if (recorder.diverged(theta)) {
      out.status = RunStatus::diverged;
      break;
    }
    if (recorder.due(k)) recorder.record(k, samples, k, theta);
  }
  finish(out, recorder, k, samples, k, theta);
  return out;
}

Trajectory rrm(const Environment& env, const ParamVector& theta1,
               std::int64_t num_rounds, double inner_tol,
               const RecordOptions& rec) {
  if (num_rounds < 1) throw std::invalid_argument("rrm: num_rounds must be >= 1");
  const auto& box = env.constraint_box();
  Trajectory out;
  Recorder recorder(env, rec, out);
  ParamVector theta = project(theta1, box);
  recorder.record(0, 0, 0, theta);

  std::int64_t k = 0;
  while (k < num_rounds) {
    ++k;
    theta = env.decoupled_minimizer(theta, inner_tol);
    if (recorder.diverged(theta)) {
      out.status = RunStatus::diverged;
      break;
    }
    if (rec.record_deployments || recorder.due(k)) recorder.record(k, 0, k, theta);
  }
  finish(out, recorder, k, 0, k, theta);
  return out;
}

ParamVector empirical_stable_point(const Environment& env,
                                   const ParamVector& theta1, double tol,
                                   std::int64_t max_rounds, double inner_tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("empirical_stable_point: tol must be > 0");
  ParamVector theta = project(theta1, env.constraint_box());
  double delta = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < max_rounds; ++k) {
    ParamVector next = env.decoupled_minimizer(theta, inner_tol);
    delta = (next - theta).norm();
    theta = std::move(next);
    if (!theta.allFinite() || theta.norm() > 1e12)
      throw std::runtime_error("empirical_stable_point: iteration diverged");
    if (delta < tol) return theta;
  }
  std::ostringstream msg;
  msg << "empirical_stable_point: no convergence in " << max_rounds
      << " rounds (last delta " << delta << ", tol " << tol << ")";
  throw std::runtime_error(msg.str());
}

}  // namespace perfsim
