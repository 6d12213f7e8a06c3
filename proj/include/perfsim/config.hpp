#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace perfsim {

// All violations found while parsing/resolving a config, reported together.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct DataSpec {
  std::string source;  // "synthetic" | "csv"
  // synthetic
  std::int64_t n = 2000;
  std::int64_t d = 10;
  double label_balance = 0.5;
  std::uint64_t seed = 7;
  // csv
  std::string path;
  std::string label_column;
  std::int64_t row_cap = 0;
  std::uint64_t shuffle_seed = 0;
};

struct EnvironmentSpec {
  std::string kind;  // "gaussian" | "eta" | "point_mass" | "strategic"
  double epsilon = 0.0;
  // gaussian
  double mu = 0.0;
  double sigma = 0.0;
  // eta
  double p = 0.0;
  double w = 0.0;
  // point_mass
  double beta_c = 0.0;
  double gamma_c = 0.0;
  // strategic
  std::vector<std::int64_t> strategic_dims;
  double lambda = 0.0;
  bool lambda_rule = false;  // lambda = 1000/n computed from the loaded data
  DataSpec data;
};

struct StepSpec {
  std::string variant = "auto";  // auto | theorem | override | constant
  double eta = 0.0;              // constant
  double c_eta = 0.0;            // override; 0 = use 100/gamma
  double k0 = -1.0;              // override; <0 = use 8 L^2/gamma^2
};

struct AlgorithmSpec {
  std::string name;  // greedy | lazy | rgd | rrm
  StepSpec step;
  bool has_step = false;
  // lazy
  double n0 = 1.0;
  double alpha = 1.0;
  bool has_deployment = false;
  // rgd
  double eta = 0.0;
  bool eta_set = false;
  std::int64_t mc_samples = 1000;
  // rrm
  double inner_tol = 1e-10;
};

struct BudgetSpec {
  std::int64_t samples = 0;
  std::int64_t deployments = 0;
  std::int64_t steps = 0;
  std::int64_t rounds = 0;
};

struct CheckpointSpec {
  std::string kind = "geometric";  // geometric | explicit
  int points = 200;
  std::vector<std::int64_t> values;
};

struct StablePointSpec {
  std::string source = "auto";  // auto | closed_form | rrm_empirical | explicit | none
  std::vector<double> value;
  double tol = 1e-9;
};

struct InitSpec {
  std::string kind = "default";  // default | zero | explicit
  std::vector<double> value;
};

struct OutputSpec {
  std::string dir = "out";
  std::int64_t perf_risk_samples = 0;
};

struct AuditSpec {
  std::int64_t pairs = 10;
  std::int64_t n_samples = 100000;
  int bootstrap = 100;
  std::int64_t coordinate = 0;
  bool paired = false;
  double pair_scale = 1.0;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  AlgorithmSpec algorithm;
  BudgetSpec budget;
  std::int64_t repeats = 30;
  std::uint64_t base_seed = 1;
  CheckpointSpec checkpoints;
  StablePointSpec stable_point;
  InitSpec init;
  OutputSpec output;
  AuditSpec audit;

  nlohmann::json to_json() const;
};

// Parse and structurally validate a config document. Accepts either a plain
// config object or an emitted metadata file (object with "resolved_config").
// Throws ConfigError listing every violation.
ExperimentConfig parse_config(const std::string& text);

}  // namespace perfsim
