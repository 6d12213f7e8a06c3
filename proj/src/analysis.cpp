#include "perfsim/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace perfsim {

BoundParams BoundParams::make(const ProblemConstants& c, double theta1_dist_sq,
                              double n0, double alpha, double alpha0) {
  BoundParams p;
  p.constants = c;
  p.theta1_dist_sq = theta1_dist_sq;
  p.M_greedy = std::max(2.0 * c.sigma_sq, 8.0 * c.L_sq * theta1_dist_sq);
  p.n0 = n0;
  p.alpha = alpha;
  p.alpha0 = alpha0;
  p.c_lazy = lazy_contraction_constant(c, n0, alpha0);
  p.lazy_valid = p.c_lazy < 1.0;
  p.M_lazy = p.lazy_valid ? lazy_m_constant(c, p.c_lazy)
                          : std::numeric_limits<double>::infinity();
  return p;
}

double greedy_bound(std::int64_t k, const BoundParams& params) {
  const auto& c = params.constants;
  if (k < 0) throw std::invalid_argument("greedy_bound: k must be >= 0");
  if (!c.in_convergence_regime())
    throw RegimeError("greedy_bound: requires epsilon < gamma/beta");
  const double eff = c.gamma - c.epsilon * c.beta;
  return params.M_greedy / (eff * eff * static_cast<double>(k) + 8.0 * c.L_sq);
}

double lazy_contraction_constant(const ProblemConstants& c, double n0,
                                 double alpha0) {
  if (!(n0 >= 1.0))
    throw std::invalid_argument("lazy contraction: n0 must be >= 1");
  if (!(alpha0 > 0.0 && alpha0 < 1.0))
    throw std::invalid_argument("lazy contraction: alpha0 in (0,1) required");
  if (!(c.gamma > 0.0))
    throw std::invalid_argument("lazy contraction: gamma must be > 0");
  const double g2 = c.gamma * c.gamma;
  const double L = std::sqrt(c.L_sq);
  const double eb = c.epsilon * c.beta;
  return 32.0 * c.L_sq / (g2 * n0) + 24.0 * eb * L / (g2 * std::sqrt(n0)) +
         1.1 * c.sigma() * eb / (g2 * std::pow(n0, 1.0 - alpha0)) +
         (eb / c.gamma) * (eb / c.gamma);
}

double lazy_m_constant(const ProblemConstants& c, double c_lazy) {
  if (!(c_lazy < 1.0))
    throw std::invalid_argument("lazy M constant: needs c < 1");
  const double s = c.sigma() + c.gamma;
  return 3.0 * s * s / (c.gamma * c.gamma * (1.0 - c_lazy));
}

double empirical_w1_1d(std::span<const double> sorted_a,
                       std::span<const double> sorted_b) {
  if (sorted_a.size() != sorted_b.size())
    throw std::invalid_argument("empirical_w1_1d: sample counts differ");
  if (sorted_a.empty())
    throw std::invalid_argument("empirical_w1_1d: need at least one sample");
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted_a.size(); ++i)
    acc += std::abs(sorted_a[i] - sorted_b[i]);
  return acc / static_cast<double>(sorted_a.size());
}

namespace {

std::vector<double> draw_projected(const Environment& env, const ParamVector& theta,
                                   std::int64_t n, Eigen::Index coord, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) {
    const Sample z = env.sample(theta, rng);
    v = coord < 0 ? *z.label : z.features[coord];
  }
  return out;
}

double bootstrap_w1_se(const std::vector<double>& a, const std::vector<double>& b,
                       int reps, Rng& rng) {
  if (reps < 2) return 0.0;
  const std::size_t n = a.size();
  std::vector<double> ra(n), rb(n), w1s;
  w1s.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      ra[i] = a[rng.uniform_index(n)];
      rb[i] = b[rng.uniform_index(n)];
    }
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    w1s.push_back(empirical_w1_1d(ra, rb));
  }
  const MeanSe ms = mean_and_se(w1s);
  return ms.se * std::sqrt(static_cast<double>(reps));  // sd of the bootstrap
}

}  // namespace

std::vector<SensitivityRow> sensitivity_audit(
    const Environment& env,
    const std::vector<std::pair<ParamVector, ParamVector>>& theta_pairs,
    const SensitivityOptions& options, Rng& rng) {
  if (options.n_samples < 1)
    throw std::invalid_argument("sensitivity_audit: n_samples must be >= 1");
  if (options.coordinate >= env.sample_dim() ||
      (options.coordinate < 0 && !env.loss().needs_label()))
    throw std::invalid_argument("sensitivity_audit: coordinate out of range");

  std::vector<SensitivityRow> report;
  report.reserve(theta_pairs.size());
  for (const auto& [ta, tb] : theta_pairs) {
    std::vector<double> a, b;
    if (options.paired) {
      const std::uint64_t seed = rng.next_u64();
      Rng ra(seed), rb(seed);
      a = draw_projected(env, ta, options.n_samples, options.coordinate, ra);
      b = draw_projected(env, tb, options.n_samples, options.coordinate, rb);
    } else {
      a = draw_projected(env, ta, options.n_samples, options.coordinate, rng);
      b = draw_projected(env, tb, options.n_samples, options.coordinate, rng);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    SensitivityRow row;
    row.theta_a = ta;
    row.theta_b = tb;
    row.dtheta_norm = (ta - tb).norm();
    row.w1 = empirical_w1_1d(a, b);
    row.bound = env.constants().epsilon * row.dtheta_norm;
    row.ratio = row.bound > 0.0 ? row.w1 / row.bound : 0.0;
    row.boot_se = bootstrap_w1_se(a, b, options.bootstrap, rng);
    row.pass = row.bound > 0.0 ? row.w1 <= row.bound + 3.0 * row.boot_se
                               : row.w1 <= options.abs_tol;
    report.push_back(std::move(row));
  }
  return report;
}

ConfidenceBand confidence_band(const std::vector<std::vector<double>>& traces,
                               double z) {
  if (traces.size() < 2)
    throw std::invalid_argument("confidence_band: need at least 2 traces");
  const std::size_t len = traces.front().size();
  for (const auto& t : traces)
    if (t.size() != len)
      throw std::invalid_argument("confidence_band: traces of unequal length");

  const double n = static_cast<double>(traces.size());
  ConfidenceBand band;
  band.mean.resize(len);
  band.lo.resize(len);
  band.hi.resize(len);
  for (std::size_t s = 0; s < len; ++s) {
    double mean = 0.0;
    for (const auto& t : traces) mean += t[s];
    mean /= n;
    double ss = 0.0;
    for (const auto& t : traces) ss += (t[s] - mean) * (t[s] - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double half = z * sd / std::sqrt(n);
    band.mean[s] = mean;
    band.lo[s] = mean - half;
    band.hi[s] = mean + half;
  }
  return band;
}

MeanSe mean_and_se(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("mean_and_se: need at least 2 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, sd / std::sqrt(n)};
}

}  // namespace perfsim
