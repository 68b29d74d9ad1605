#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "expint/harness.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  int threads = 1;
  std::optional<std::uint64_t> seed;

  expint::RunOptions options() const {
    expint::RunOptions o;
    if (!out.empty()) o.out = out;
    o.threads = threads;
    o.seed = seed;
    return o;
  }
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment config file")->required();
  cmd->add_option("--out", flags.out,
                  "Output directory (default: config output.directory, then $" +
                      std::string(expint::kOutputDirEnv) + ", then ./expint_out)");
  cmd->add_option("--threads", flags.threads, "Worker threads for step-size sweeps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Override every random seed in the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential integrator experiments for semilinear parabolic problems"};
  app.set_version_flag("--version", EXPINT_VERSION);
  app.require_subcommand(1);

  expint::PhiRequest phi;
  std::vector<double> z_values;
  double z_min = 0.0;
  double z_max = 0.0;
  int count = 0;
  auto* phi_cmd = app.add_subcommand("phi", "Tabulate phi_k(z) against the quadrature oracle");
  phi_cmd->add_option("--k", phi.k, "Order k")->required();
  auto* z_opt = phi_cmd->add_option("--z", z_values, "Evaluation points");
  auto* min_opt = phi_cmd->add_option("--z-min", z_min, "Range start");
  auto* max_opt = phi_cmd->add_option("--z-max", z_max, "Range end");
  auto* count_opt = phi_cmd->add_option("--count", count, "Number of range points")
                        ->check(CLI::PositiveNumber);
  z_opt->excludes(min_opt)->excludes(max_opt)->excludes(count_opt);
  min_opt->needs(max_opt)->needs(count_opt);
  max_opt->needs(min_opt);
  phi_cmd->add_option("--tol", phi.tol, "Oracle tolerance")->check(CLI::Range(1e-14, 1e-2));

  RunFlags converge_flags, defect_flags, solve_flags;
  auto* converge_cmd = app.add_subcommand("converge", "Run a step-size convergence study");
  add_run_flags(converge_cmd, converge_flags);
  auto* defect_cmd = app.add_subcommand("defect", "Measure the dimension-splitting defect");
  add_run_flags(defect_cmd, defect_flags);
  auto* solve_cmd = app.add_subcommand("solve", "Integrate once and write state grids");
  add_run_flags(solve_cmd, solve_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : expint::kExitConfig;
  }

  if (phi_cmd->parsed()) {
    if (!min_opt->empty()) {
      for (int i = 0; i < count; ++i) {
        const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        z_values.push_back(z_min + s * (z_max - z_min));
      }
    }
    if (z_values.empty()) {
      std::cerr << "error: give evaluation points with --z or --z-min/--z-max/--count\n";
      return expint::kExitConfig;
    }
    phi.z = z_values;
    return expint::cmd_phi(phi, std::cout, std::cerr);
  }
  if (converge_cmd->parsed()) {
    return expint::cmd_converge(converge_flags.config, converge_flags.options(), std::cout, std::cerr);
  }
  if (defect_cmd->parsed()) {
    return expint::cmd_defect(defect_flags.config, defect_flags.options(), std::cout, std::cerr);
  }
  return expint::cmd_solve(solve_flags.config, solve_flags.options(), std::cout, std::cerr);
}
