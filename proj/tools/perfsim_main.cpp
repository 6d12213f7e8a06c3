// perfsim: configuration-driven simulator for stochastic optimization under
// performative distribution shift. Subcommands: run, audit-sensitivity,
// stable-point, validate. Exit codes: 0 success, 1 validation error,
// 2 runtime error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "perfsim/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string resolve_out_dir(const std::string& flag_value,
                            const perfsim::ExperimentConfig& cfg) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("PERFSIM_OUT_DIR"); env && *env) return env;
  return cfg.output.dir;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  std::int64_t repeats = -1;
  int jobs = 1;
};

perfsim::ResolvedExperiment load_and_resolve(const CommonArgs& args) {
  perfsim::ExperimentConfig cfg = perfsim::parse_config(read_file(args.config_path));
  if (args.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(args.seed);
  if (args.repeats >= 1) cfg.repeats = args.repeats;
  return perfsim::resolve_experiment(cfg);
}

void print_stable_point(const perfsim::ResolvedExperiment& exp) {
  const auto& c = exp.env->constants();
  std::cout << "environment: " << exp.env->name() << "\n"
            << "constants: epsilon=" << c.epsilon << " beta=" << c.beta
            << " gamma=" << c.gamma << " sigma_sq=" << c.sigma_sq
            << " L_sq=" << c.L_sq << "\n"
            << "gamma/beta: " << (c.beta > 0 ? c.gamma / c.beta : 0.0)
            << (c.in_convergence_regime() ? " (inside convergence regime)"
                                          : " (OUTSIDE convergence regime)")
            << "\n";
  if (!c.in_convergence_regime())
    std::cout << "warning: epsilon >= gamma/beta; a unique stable point is not "
                 "guaranteed and fixed-point iteration may diverge\n";
  std::cout << "stable point source: " << exp.stable_point_source << "\n";
  if (exp.stable_point) {
    std::cout << "theta_PS:";
    for (Eigen::Index i = 0; i < exp.stable_point->size(); ++i)
      std::cout << ' ' << perfsim::format_g17((*exp.stable_point)[i]);
    std::cout << "\n";
  } else {
    std::cout << "theta_PS: none\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for stochastic optimization under performative "
               "distribution shift"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* run = app.add_subcommand("run", "run the configured experiment");
  run->add_option("config", args.config_path, "config or metadata JSON file")
      ->required();
  run->add_option("--out", args.out_dir, "output directory");
  run->add_option("--seed", args.seed, "override base_seed");
  run->add_option("--repeats", args.repeats, "override repeats");
  run->add_option("--jobs", args.jobs, "concurrent replicate runs");

  auto* audit = app.add_subcommand("audit-sensitivity",
                                   "empirical W1 sensitivity audit");
  audit->add_option("config", args.config_path, "config JSON file")->required();
  audit->add_option("--out", args.out_dir, "output directory");

  auto* stable = app.add_subcommand("stable-point",
                                    "resolve and print the stable point");
  stable->add_option("config", args.config_path, "config JSON file")->required();

  auto* validate = app.add_subcommand("validate",
                                      "validate a config and echo it resolved");
  validate->add_option("config", args.config_path, "config JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto exp = load_and_resolve(args);
      const std::string out = resolve_out_dir(args.out_dir, exp.config);
      const auto result = perfsim::run_experiment(exp, out, args.jobs);
      std::cout << "wrote " << result.trace_files.size() << " trace file(s), "
                << result.aggregate_file << " and " << result.metadata_file
                << " to " << out << "\n";
      if (result.runs_diverged > 0)
        std::cout << result.runs_diverged << " run(s) diverged\n";
      return 0;
    }
    if (audit->parsed()) {
      const auto exp = load_and_resolve(args);
      const std::string out = resolve_out_dir(args.out_dir, exp.config);
      const auto rows = perfsim::run_sensitivity_audit(exp, out);
      bool all_pass = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::cout << "pair " << i << ": |dtheta|=" << r.dtheta_norm
                  << " W1=" << r.w1 << " bound=" << r.bound
                  << " ratio=" << r.ratio << " se=" << r.boot_se << " "
                  << (r.pass ? "pass" : "FAIL") << "\n";
        all_pass = all_pass && r.pass;
      }
      std::cout << "audit written to " << out << "/audit.csv\n";
      return all_pass ? 0 : 2;
    }
    if (stable->parsed()) {
      print_stable_point(load_and_resolve(args));
      return 0;
    }
    if (validate->parsed()) {
      const auto exp = load_and_resolve(args);
      std::cout << exp.config.to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const perfsim::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
