#pragma once

#include <memory>

#include "perfsim/analysis.hpp"
#include "perfsim/config.hpp"
#include "perfsim/environments.hpp"
#include "perfsim/optimizers.hpp"

namespace perfsim {

// A config with the environment built and every derived choice pinned:
// initialization, stable point, schedules, checkpoint grid. Semantic
// violations (regime errors, capability mismatches, bad data) are collected
// into a single ConfigError.
struct ResolvedExperiment {
  ExperimentConfig config;  // stable point cached as explicit when computed
  std::shared_ptr<const Environment> env;
  ParamVector theta1;
  std::optional<ParamVector> stable_point;
  std::string stable_point_source;  // closed_form | rrm_empirical | explicit | none
  std::string stable_point_source_requested;
  std::optional<StepSchedule> step_schedule;
  std::string step_variant_requested;
  bool schedule_switched = false;  // auto resolved to the empirical override
  double rgd_eta = 0.0;
  std::vector<std::int64_t> checkpoints;
};

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<std::string> trace_files;
  std::string aggregate_file;
  std::string metadata_file;
  std::int64_t runs_diverged = 0;
};

// Run all replicates, write per-run trace CSVs, the aggregate CSV with the
// 90% band, and a metadata file that reproduces the experiment byte-for-byte
// when passed back to `run`. Files are written atomically.
ExperimentResult run_experiment(const ResolvedExperiment& exp,
                                const std::string& out_dir, int jobs = 1);

// Run the configured sensitivity audit and write audit.csv.
std::vector<SensitivityRow> run_sensitivity_audit(const ResolvedExperiment& exp,
                                                  const std::string& out_dir);

// Risk-evaluation substream id for run r (disjoint from trajectory streams).
inline std::uint64_t risk_stream_id(std::int64_t run) {
  return 0x8000000000000000ull | static_cast<std::uint64_t>(run);
}

void write_file_atomic(const std::string& path, const std::string& content);
std::string format_g17(double v);

}  // namespace perfsim
