// Acceptance suite: runs every criterion end to end and prints one pass/fail
// line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "perfsim/runner.hpp"

using namespace perfsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", id,
              what.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ParamVector scalar(double v) {
  ParamVector t(1);
  t[0] = v;
  return t;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// dist^2 values per checkpoint index, one row per run; all runs share the
// same record layout when none diverge.
std::vector<std::vector<double>> collect_dist_traces(
    const std::vector<Trajectory>& runs) {
  const std::size_t len = runs.front().records.size();
  std::vector<std::vector<double>> per_checkpoint(len);
  for (const auto& t : runs) {
    if (t.records.size() != len)
      throw std::runtime_error("collect_dist_traces: ragged trajectories");
    for (std::size_t i = 0; i < len; ++i)
      per_checkpoint[i].push_back(t.records[i].dist_sq.value());
  }
  return per_checkpoint;
}

struct GreedyGaussianResult {
  std::vector<Trajectory> runs;
  double final_mean = 0.0;
  double elapsed = 0.0;
};

GreedyGaussianResult run_greedy_gaussian(double epsilon, std::int64_t steps,
                                         int repeats, std::uint64_t base_seed,
                                         const std::vector<std::int64_t>& grid) {
  GaussianEnv env(10.0, 0.1, epsilon);
  const ParamVector ps = *env.stable_point_closed_form();
  const StepSchedule sched = StepSchedule::greedy_theorem(env.constants());
  GreedyGaussianResult out;
  const auto t0 = Clock::now();
  for (int r = 0; r < repeats; ++r) {
    Rng rng = Rng::substream(base_seed, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    rec.checkpoints = grid;
    rec.stable_ref = ps;
    out.runs.push_back(greedy_deploy(env, scalar(10.0), steps, sched, rec, rng));
  }
  out.elapsed = seconds_since(t0);
  std::vector<double> finals;
  for (const auto& t : out.runs)
    finals.push_back(t.records.back().dist_sq.value());
  out.final_mean = oracles::mean(finals);
  return out;
}

void criterion_1_and_2() {
  const std::int64_t steps = 50000;
  const auto grid = geometric_checkpoints(steps, 200);
  bool c1_ok = true;
  std::string c1_detail;

  std::vector<std::vector<double>> eps02_traces;
  for (const double eps : {0.2, 0.6, 0.9}) {
    GaussianEnv env(10.0, 0.1, eps);
    const double ps = (*env.stable_point_closed_form())[0];
    const auto res = run_greedy_gaussian(eps, steps, 30, 2025, grid);
    const double d1 = (10.0 - ps) * (10.0 - ps);
    const BoundParams bp = BoundParams::make(env.constants(), d1);
    const double threshold = 10.0 * greedy_bound(steps, bp);
    const bool ok = res.final_mean < threshold && res.elapsed < 60.0;
    c1_ok = c1_ok && ok;
    c1_detail += "eps=" + fmt(eps) + ": mean=" + fmt(res.final_mean) +
                 " thr=" + fmt(threshold) + " t=" + fmt(res.elapsed) + "s; ";
    if (eps == 0.2) eps02_traces = collect_dist_traces(res.runs);
  }
  report(1, "gaussian greedy converges to the closed-form stable points", c1_ok,
         c1_detail);

  // Criterion 2: bound dominance at every checkpoint for eps = 0.2.
  GaussianEnv env02(10.0, 0.1, 0.2);
  const BoundParams bp02 = BoundParams::make(env02.constants(), 6.25);
  bool c2_ok = true;
  double worst_margin = -1e300;
  std::int64_t worst_k = 0;
  // Record i = 0 is the initial state (k = 0), then the grid.
  std::vector<std::int64_t> ks;
  ks.push_back(0);
  ks.insert(ks.end(), grid.begin(), grid.end());
  for (std::size_t i = 0; i < eps02_traces.size(); ++i) {
    const auto& vals = eps02_traces[i];
    const MeanSe ms = mean_and_se(vals);
    const double bound = greedy_bound(ks[i], bp02);
    const double margin = ms.mean - (bound + 3.0 * ms.se);
    if (margin > worst_margin) {
      worst_margin = margin;
      worst_k = ks[i];
    }
    c2_ok = c2_ok && margin <= 0.0;
  }
  report(2, "greedy mean never exceeds the theoretical bound (eps=0.2)", c2_ok,
         "worst margin " + fmt(worst_margin) + " at k=" +
             std::to_string(worst_k));
}

void criterion_3() {
  const auto t0 = Clock::now();
  GaussianEnv env(10.0, 0.1, 0.2);
  const double eta = 0.8 / (2.0 * (1.0 + 0.04));
  const double expected = 1.0 - eta * 0.8;      // exact per-step ratio
  const double prop_factor = 1.0 - eta * 0.8 / 2.0;
  RecordOptions rec;
  for (std::int64_t k = 1; k <= 12; ++k) rec.checkpoints.push_back(k);
  rec.stable_ref = scalar(12.5);
  const Trajectory t = rgd(env, scalar(10.0), eta, 12, 1, rec, nullptr);
  bool ok = true;
  double worst_rel = 0.0;
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    const double prev = std::abs(t.records[i - 1].theta[0] - 12.5);
    const double cur = std::abs(t.records[i].theta[0] - 12.5);
    const double ratio = cur / prev;
    const double rel = std::abs(ratio - expected) / expected;
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel <= 1e-12 && ratio <= prop_factor;
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 1.0;
  report(3, "rgd contracts at exactly 1 - eta(1-eps) and within the proven factor",
         ok,
         "ratio=" + fmt(expected) + " worst rel err=" + fmt(worst_rel) +
             " factor=" + fmt(prop_factor) + " t=" + fmt(elapsed) + "s");
}

void criterion_4() {
  bool ok = true;
  std::string detail;
  const struct {
    double eps, beta_c, gamma_c;
  } cases[] = {{1.0, 1.0, 0.0}, {1.0, 2.0, 1.0}};
  for (const auto& c : cases) {
    PointMassEnv env(c.eps, c.beta_c, c.gamma_c);
    for (const double eta : {0.01, 0.1, 1.0}) {
      RecordOptions rec;
      for (std::int64_t i = 1; i <= 5000; ++i) rec.checkpoints.push_back(i);
      const Trajectory t =
          rgd(env, env.default_init(), eta, 5000, 1, rec, nullptr);
      bool increasing = true;
      double prev = -1.0;
      for (const auto& r : t.records) {
        if (r.step == 0) continue;
        increasing = increasing && std::abs(r.theta[0]) > prev;
        prev = std::abs(r.theta[0]);
      }
      const bool this_ok = increasing && t.status == RunStatus::diverged;
      ok = ok && this_ok;
      if (!this_ok)
        detail += "FAILED gamma_c=" + fmt(c.gamma_c) + " eta=" + fmt(eta) + "; ";
    }
  }
  if (detail.empty())
    detail = "|theta_k| strictly increasing, status=diverged for all 6 settings";
  report(4, "point-mass counterexamples diverge under rgd", ok, detail);
}

void criterion_5() {
  GaussianEnv env(10.0, 0.1, 0.2);
  const ProblemConstants& c = env.constants();
  const double ps = 12.5;
  Rng rng(314159);
  const int n_mc = 100000;
  bool ok = true;
  double worst = -1e300;

  // Greedy one-step mean-square recursion at 20 random (theta_k, k) states.
  for (int s = 0; s < 20; ++s) {
    const double theta = ps + 10.0 * (rng.uniform() - 0.5);
    const std::int64_t k =
        static_cast<std::int64_t>(std::exp(rng.uniform() * std::log(1e4))) + 1;
    const double eta = greedy_step_size(k, c);
    std::vector<double> vals(n_mc);
    for (auto& v : vals) {
      const double z = env.sample(scalar(theta), rng).features[0];
      const double next = theta - eta * (theta - z);
      v = (next - ps) * (next - ps);
    }
    const MeanSe ms = mean_and_se(vals);
    const double d2 = (theta - ps) * (theta - ps);
    const double mult = 1.0 - 2.0 * eta * (c.gamma - c.epsilon * c.beta) +
                        eta * eta * c.L_sq * std::pow(1.0 + c.epsilon * c.beta / c.gamma, 2);
    const double rhs = mult * d2 + eta * eta * c.sigma_sq;
    const double margin = ms.mean - (rhs + 3.0 * ms.se);
    worst = std::max(worst, margin);
    ok = ok && margin <= 0.0;
  }

  // Inner (offline) recursion toward G(theta_k) at 20 random (phi, j) states.
  const double theta_k = 11.3;
  const double g = 10.0 + 0.2 * theta_k;
  for (int s = 0; s < 20; ++s) {
    const double phi = g + 10.0 * (rng.uniform() - 0.5);
    const std::int64_t j =
        static_cast<std::int64_t>(std::exp(rng.uniform() * std::log(1e4))) + 1;
    const double eta = lazy_step_size(j, c);
    std::vector<double> vals(n_mc);
    for (auto& v : vals) {
      const double z = env.sample(scalar(theta_k), rng).features[0];
      const double next = phi - eta * (phi - z);
      v = (next - g) * (next - g);
    }
    const MeanSe ms = mean_and_se(vals);
    const double d2 = (phi - g) * (phi - g);
    const double rhs =
        (1.0 - 2.0 * eta * c.gamma + eta * eta * c.L_sq) * d2 + eta * eta * c.sigma_sq;
    const double margin = ms.mean - (rhs + 3.0 * ms.se);
    worst = std::max(worst, margin);
    ok = ok && margin <= 0.0;
  }
  report(5, "one-step recursions hold under Monte Carlo (greedy and inner)", ok,
         "40 states x 1e5 draws, worst violation margin " + fmt(worst));
}

void criterion_6() {
  GaussianEnv env(10.0, 0.1, 0.2);
  Rng rng(161803);
  std::vector<std::pair<ParamVector, ParamVector>> pairs;
  for (int i = 0; i < 10; ++i) {
    const double a = 10.0 + 2.0 * rng.normal();
    const double delta = (rng.bernoulli(0.5) ? 1.0 : -1.0) *
                         (0.5 + 1.5 * rng.uniform());
    pairs.emplace_back(scalar(a), scalar(a + delta));
  }
  SensitivityOptions opt;
  opt.n_samples = 100000;
  opt.bootstrap = 100;
  const auto rows = sensitivity_audit(env, pairs, opt, rng);
  bool ok = true;
  double worst_ratio_dev = 0.0;
  for (const auto& r : rows) {
    ok = ok && r.pass && std::abs(r.w1 - r.bound) <= 3.0 * r.boot_se &&
         r.ratio >= 0.97 && r.ratio <= 1.03;
    worst_ratio_dev = std::max(worst_ratio_dev, std::abs(r.ratio - 1.0));
  }
  report(6, "empirical W1 sensitivity matches eps|dtheta| (10 pairs, n=1e5)", ok,
         "worst tightness deviation " + fmt(worst_ratio_dev));
}

double mean_final_dist_sq_greedy(const GaussianEnv& env, const StepSchedule& s,
                                 std::int64_t steps, int repeats,
                                 std::uint64_t seed) {
  const ParamVector ps = *env.stable_point_closed_form();
  std::vector<double> finals;
  for (int r = 0; r < repeats; ++r) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    const Trajectory t =
        greedy_deploy(env, env.default_init(), steps, s, rec, rng);
    finals.push_back((t.final_theta - ps).squaredNorm());
  }
  return oracles::mean(finals);
}

double mean_final_dist_sq_lazy(const GaussianEnv& env, double alpha,
                               std::int64_t samples, int repeats,
                               std::uint64_t seed) {
  const ParamVector ps = *env.stable_point_closed_form();
  const StepSchedule inner = StepSchedule::lazy_theorem(env.constants());
  std::vector<double> finals;
  for (int r = 0; r < repeats; ++r) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    const Trajectory t =
        lazy_deploy(env, env.default_init(), LazyBudget{0, samples},
                    DeploymentSchedule(1.0, alpha), inner, rec, rng);
    finals.push_back((t.final_theta - ps).squaredNorm());
  }
  return oracles::mean(finals);
}

void criterion_7() {
  const std::int64_t samples = 50000;
  GaussianEnv strong(10.0, 0.1, 0.9), weak(10.0, 0.1, 0.2);

  const double greedy_strong = mean_final_dist_sq_greedy(
      strong, StepSchedule::greedy_theorem(strong.constants()), samples, 30, 11);
  const double lazy_strong = mean_final_dist_sq_lazy(strong, 1.0, samples, 30, 11);
  const double greedy_weak = mean_final_dist_sq_greedy(
      weak, StepSchedule::greedy_theorem(weak.constants()), samples, 30, 12);
  const double lazy_weak = mean_final_dist_sq_lazy(weak, 1.0, samples, 30, 12);

  const bool ok = lazy_strong < greedy_strong && greedy_weak < lazy_weak;
  report(7, "crossover: lazy wins at eps=0.9, greedy wins at eps=0.2", ok,
         "eps=0.9 lazy=" + fmt(lazy_strong) + " greedy=" + fmt(greedy_strong) +
             "; eps=0.2 greedy=" + fmt(greedy_weak) + " lazy=" + fmt(lazy_weak));
}

std::int64_t greedy_deployments_to_threshold(const GaussianEnv& env,
                                             std::int64_t budget, int repeats,
                                             std::uint64_t seed, double thr) {
  const ParamVector ps = *env.stable_point_closed_form();
  const StepSchedule sched = StepSchedule::greedy_theorem(env.constants());
  const auto grid = geometric_checkpoints(budget, 2000);
  std::vector<Trajectory> runs;
  for (int r = 0; r < repeats; ++r) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    rec.checkpoints = grid;
    rec.stable_ref = ps;
    runs.push_back(greedy_deploy(env, env.default_init(), budget, sched, rec, rng));
  }
  const auto traces = collect_dist_traces(runs);
  for (std::size_t i = 0; i < traces.size(); ++i)
    if (oracles::mean(traces[i]) <= thr)
      return runs.front().records[i].deployments;
  return -1;
}

std::int64_t lazy_deployments_to_threshold(const GaussianEnv& env, double alpha,
                                           std::int64_t budget, int repeats,
                                           std::uint64_t seed, double thr) {
  const ParamVector ps = *env.stable_point_closed_form();
  const StepSchedule inner = StepSchedule::lazy_theorem(env.constants());
  // Mean dist^2 of the deployed model, per deployment index.
  std::map<std::int64_t, std::vector<double>> by_deployment;
  for (int r = 0; r < repeats; ++r) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    rec.record_deployments = true;
    rec.stable_ref = ps;
    const Trajectory t =
        lazy_deploy(env, env.default_init(), LazyBudget{0, budget},
                    DeploymentSchedule(1.0, alpha), inner, rec, rng);
    std::int64_t seen = 0;
    for (const auto& rcd : t.records) {
      if (rcd.step == 0 || rcd.deployments == seen) continue;
      seen = rcd.deployments;
      by_deployment[seen].push_back(rcd.dist_sq.value());
    }
  }
  for (const auto& [k, vals] : by_deployment)
    if (static_cast<int>(vals.size()) == repeats && oracles::mean(vals) <= thr)
      return k;
  return -1;
}

void criterion_8() {
  GaussianEnv env(10.0, 0.1, 0.9);
  const std::int64_t budget = 400000;
  const double thr = 0.1;
  const std::int64_t d_greedy =
      greedy_deployments_to_threshold(env, budget, 30, 21, thr);
  const std::int64_t d_lazy1 =
      lazy_deployments_to_threshold(env, 1.0, budget, 30, 21, thr);
  const std::int64_t d_lazy2 =
      lazy_deployments_to_threshold(env, 2.0, budget, 30, 21, thr);
  const bool ok = d_lazy2 > 0 && d_lazy1 > 0 && d_greedy > 0 &&
                  d_lazy2 < d_lazy1 && d_lazy1 < d_greedy;
  report(8, "deployments to reach dist^2 <= 0.1: lazy(a=2) < lazy(a=1) < greedy",
         ok,
         "lazy(a=2)=" + std::to_string(d_lazy2) + " lazy(a=1)=" +
             std::to_string(d_lazy1) + " greedy=" + std::to_string(d_greedy));
}

void criterion_9() {
  EtaEnv env(0.5, 20.0, 4.0, 0.25);
  const ParamVector ps = *env.stable_point_closed_form();
  // Outside the provable regime for this environment's declared constants:
  // the runner's documented auto-switch uses the empirical override.
  const StepSchedule sched =
      env.constants().in_convergence_regime()
          ? StepSchedule::greedy_theorem(env.constants())
          : StepSchedule::override_empirical(env.constants());
  std::vector<double> finals;
  for (int r = 0; r < 30; ++r) {
    Rng rng = Rng::substream(31, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    const Trajectory t =
        greedy_deploy(env, env.default_init(), 50000, sched, rec, rng);
    finals.push_back((t.final_theta - ps).squaredNorm());
  }
  const double greedy_mean = oracles::mean(finals);

  RecordOptions rec;
  const Trajectory rrm_t = rrm(env, env.default_init(), 60, 1e-12, rec);
  const double rrm_dist = (rrm_t.final_theta - ps).norm();

  const bool ok = greedy_mean < 1e-2 && rrm_dist < 1e-9;
  report(9, "eta environment: greedy reaches (w/(1+eps), mu); rrm to 1e-9", ok,
         "greedy mean dist^2=" + fmt(greedy_mean) + ", rrm dist=" + fmt(rrm_dist) +
             " after " + std::to_string(rrm_t.total_deployments) + " rounds");
}

void criterion_10() {
  const auto data = std::make_shared<Dataset>(synthetic_credit(2000, 10, 0.5, 7));
  const std::vector<Eigen::Index> dims{1, 6, 8};
  const double lambda = 1000.0 / 2000.0;

  // Constants formula on this data: standardized features make the mean
  // squared row norm exactly d.
  const ProblemConstants base_c = compute_logistic_constants(*data, lambda);
  const double beta_expected =
      std::max(2.0, 0.25 * data->features.rowwise().squaredNorm().mean() + lambda);
  bool ok = std::abs(base_c.beta - beta_expected) < 1e-12 &&
            std::abs(base_c.beta - 3.0) < 1e-9 && base_c.gamma == lambda;

  const double ratio = base_c.gamma / base_c.beta;  // 1/6
  const double eps_strong = 50.0 * ratio;
  const double eps_weak = 1e-3 * ratio;

  // (i) empirical stable point, stable under re-run from a different init.
  StrategicEnv env_strong(data, eps_strong, dims, lambda);
  const ParamVector ps_a =
      empirical_stable_point(env_strong, env_strong.base_minimizer(), 1e-9);
  const ParamVector ps_b = empirical_stable_point(
      env_strong, ParamVector::Zero(10), 1e-9);
  const double rerun_gap = (ps_a - ps_b).norm();
  ok = ok && rerun_gap <= 1e-6;

  // (ii) override schedules, equal sample budget: lazy(a=2) beats greedy.
  const StepSchedule override_sched =
      StepSchedule::override_empirical(env_strong.constants());
  const std::int64_t budget = 30000;
  std::vector<double> greedy_finals, lazy_finals;
  for (int r = 0; r < 30; ++r) {
    Rng rng = Rng::substream(41, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    const Trajectory t = greedy_deploy(env_strong, env_strong.base_minimizer(),
                                       budget, override_sched, rec, rng);
    greedy_finals.push_back((t.final_theta - ps_a).squaredNorm());
  }
  for (int r = 0; r < 30; ++r) {
    Rng rng = Rng::substream(42, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    const Trajectory t = lazy_deploy(env_strong, env_strong.base_minimizer(),
                                     LazyBudget{0, budget},
                                     DeploymentSchedule(1.0, 2.0),
                                     override_sched, rec, rng);
    lazy_finals.push_back((t.final_theta - ps_a).squaredNorm());
  }
  const double greedy_mean = oracles::mean(greedy_finals);
  const double lazy_mean = oracles::mean(lazy_finals);
  ok = ok && lazy_mean < greedy_mean;

  // (iii) weak performativity: greedy with the theorem schedule converges.
  StrategicEnv env_weak(data, eps_weak, dims, lambda);
  const ParamVector ps_weak =
      empirical_stable_point(env_weak, env_weak.base_minimizer(), 1e-10);
  const StepSchedule theorem = StepSchedule::greedy_theorem(env_weak.constants());
  const double init_dist = ps_weak.squaredNorm();  // theta1 = 0
  std::vector<double> weak_finals;
  for (int r = 0; r < 30; ++r) {
    Rng rng = Rng::substream(43, static_cast<std::uint64_t>(r));
    RecordOptions rec;
    const Trajectory t = greedy_deploy(env_weak, ParamVector::Zero(10), 50000,
                                       theorem, rec, rng);
    weak_finals.push_back((t.final_theta - ps_weak).squaredNorm());
  }
  const double weak_mean = oracles::mean(weak_finals);
  ok = ok && weak_mean < 1e-3 && weak_mean < 1e-2 * init_dist;

  report(10, "strategic classification at desk scale", ok,
         "beta=" + fmt(base_c.beta) + " rerun gap=" + fmt(rerun_gap) +
             "; eps*beta/gamma=50: lazy=" + fmt(lazy_mean) + " greedy=" +
             fmt(greedy_mean) + "; weak eps: final=" + fmt(weak_mean) +
             " init=" + fmt(init_dist));
}

void criterion_11() {
  bool ok = true;
  std::string detail;

  // (a) finite-difference gradient checks, 100 points per loss.
  {
    Rng rng(51);
    double worst = 0.0;
    SquaredLoss squared;
    RegularizedLogisticLoss logistic(10, 0.5);
    AffineSquaredLoss affine(1);
    for (int i = 0; i < 100; ++i) {
      Sample z;
      z.features = scalar(5.0 * rng.normal());
      ParamVector t = scalar(5.0 * rng.normal());
      worst = std::max(worst, (loss_grad(squared, z, t) -
                               oracles::fd_gradient(squared, z, t))
                                  .norm() /
                                  std::max(1.0, oracles::fd_gradient(squared, z, t).norm()));
    }
    for (int i = 0; i < 100; ++i) {
      Sample z;
      z.features.resize(10);
      for (int j = 0; j < 10; ++j) z.features[j] = rng.normal();
      z.label = rng.bernoulli(0.5) ? 1.0 : 0.0;
      ParamVector t(10);
      for (int j = 0; j < 10; ++j) t[j] = rng.normal();
      const auto fd = oracles::fd_gradient(logistic, z, t);
      worst = std::max(worst, (loss_grad(logistic, z, t) - fd).norm() /
                                  std::max(1.0, fd.norm()));
    }
    for (int i = 0; i < 100; ++i) {
      Sample z;
      z.features = scalar(rng.normal());
      z.label = 3.0 * rng.normal();
      ParamVector t(2);
      t << rng.normal(), rng.normal();
      const auto fd = oracles::fd_gradient(affine, z, t);
      worst = std::max(worst, (loss_grad(affine, z, t) - fd).norm() /
                                  std::max(1.0, fd.norm()));
    }
    ok = ok && worst < 1e-5;
    detail += "fd worst rel=" + fmt(worst);
  }

  // (b) best-response grid oracle, 1000 cases.
  {
    Rng rng(52);
    const std::vector<Eigen::Index> dims{1, 6, 8};
    double worst_gap = -1e300;
    for (int i = 0; i < 1000; ++i) {
      Eigen::VectorXd x(10);
      ParamVector theta(10);
      for (int j = 0; j < 10; ++j) {
        x[j] = rng.normal();
        theta[j] = rng.normal();
      }
      const double eps = 0.05 + 2.0 * rng.uniform();
      const Eigen::VectorXd br = best_response(x, theta, eps, dims);
      const double closed = oracles::agent_utility(br, x, theta, eps);
      const double grid =
          oracles::grid_search_best_utility(x, theta, eps, dims, 21, 4.0);
      worst_gap = std::max(worst_gap, grid - closed);
    }
    ok = ok && worst_gap < 1e-9;
    detail += "; br worst gap=" + fmt(worst_gap);
  }

  // (c) bit-identical reruns from emitted metadata.
  {
    const fs::path dir = fs::temp_directory_path() / "perfsim_acceptance";
    fs::remove_all(dir);
    ExperimentConfig cfg = parse_config(R"json({
      "environment": {"kind": "gaussian", "mu": 10, "sigma": 0.1, "epsilon": 0.6},
      "algorithm": {"name": "lazy", "deployment": {"n0": 1, "alpha": 1}},
      "budget": {"samples": 2000},
      "repeats": 5,
      "output": {"perf_risk_samples": 100}
    })json");
    run_experiment(resolve_experiment(cfg), (dir / "a").string());
    std::ifstream meta(dir / "a" / "metadata.json");
    std::ostringstream buf;
    buf << meta.rdbuf();
    run_experiment(resolve_experiment(parse_config(buf.str())),
                   (dir / "b").string());
    bool same = true;
    for (const char* name :
         {"run_000.csv", "run_004.csv", "aggregate.csv"}) {
      std::ifstream fa(dir / "a" / name), fb(dir / "b" / name);
      std::ostringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      same = same && !sa.str().empty() && sa.str() == sb.str();
    }
    ok = ok && same;
    detail += same ? "; metadata rerun byte-identical" : "; METADATA RERUN DIFFERS";
  }

  // (d) RRM contraction ratio <= eps*beta/gamma, 50 pairs per environment.
  {
    Rng rng(53);
    const GaussianEnv g(10.0, 0.1, 0.3);
    const EtaEnv e(0.5, 20.0, 4.0, 0.25);
    const PointMassEnv p(0.2, 1.0, 1.0);
    const auto data = std::make_shared<Dataset>(synthetic_credit(400, 6, 0.5, 8));
    const StrategicEnv s(data, 2.0, {1, 4}, 0.5);
    const std::vector<const Environment*> envs{&g, &e, &p, &s};
    bool contraction_ok = true;
    for (const Environment* env : envs) {
      const ProblemConstants& c = env->constants();
      const double bound = c.epsilon * c.beta / c.gamma;
      for (int i = 0; i < 50; ++i) {
        ParamVector a(env->param_dim()), b(env->param_dim());
        for (Eigen::Index j = 0; j < a.size(); ++j) {
          a[j] = 2.0 * rng.normal();
          b[j] = 2.0 * rng.normal();
        }
        a = project(a, env->constraint_box());
        b = project(b, env->constraint_box());
        if ((a - b).norm() == 0.0) continue;
        const double ratio = (env->decoupled_minimizer(a, 1e-10) -
                              env->decoupled_minimizer(b, 1e-10))
                                 .norm() /
                             (a - b).norm();
        contraction_ok = contraction_ok && ratio <= bound * (1.0 + 1e-12) + 1e-9;
      }
    }
    ok = ok && contraction_ok;
    detail += contraction_ok ? "; contraction ok" : "; CONTRACTION VIOLATED";
  }

  report(11, "property suites (gradients, best response, reruns, contraction)",
         ok, detail);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d/11 criteria passed in %.1fs\n", 11 - g_failures,
              seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
