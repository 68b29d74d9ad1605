#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expint/analysis.hpp"
#include "expint/config.hpp"

namespace expint {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDivergence = 3, kExitIo = 4 };

struct RunOptions {
  std::optional<std::filesystem::path> out;  // overrides the config's output directory
  int threads = 1;
  std::optional<std::uint64_t> seed;         // overrides every seed in the config
};

struct PhiRequest {
  int k = 1;
  std::vector<double> z;
  double tol = 1e-14;  // oracle tolerance, scaled by max(1, |phi|)
};

/// Output directory: --out, else the config's directory, else $EXPINT_OUTPUT_DIR,
/// else ./expint_out.
std::filesystem::path resolve_output_dir(const RunOptions& options, const OutputConfig& output);

/// Write via a temporary file in the same directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Replace all seeds in the config with `seed`.
void apply_seed_override(ExperimentConfig& config, std::uint64_t seed);

std::string format_number(double value);

/// Tabulated CSV and key-value views of the results. Each embeds the config hash.
std::string report_csv(const ConvergenceReport& report, const std::string& hash);
std::string report_meta(const ConvergenceReport& report, const std::string& hash);
std::string timing_csv(const ConvergenceReport& report, const std::string& hash);
std::string defect_csv(const DefectReport& report, const std::string& hash);
std::string defect_meta(const DefectReport& report, const std::string& hash);
/// Nodal values including the zero boundary, one grid row per line, y rows outermost.
std::string state_grid_csv(const State& u, const Grid& grid, double t, const std::string& hash);

/// Each command reports progress on `log`, failures on `err`, and returns an ExitCode.
int cmd_phi(const PhiRequest& request, std::ostream& out, std::ostream& err);
int cmd_converge(const std::filesystem::path& config_path, const RunOptions& options,
                 std::ostream& log, std::ostream& err);
int cmd_defect(const std::filesystem::path& config_path, const RunOptions& options,
               std::ostream& log, std::ostream& err);
int cmd_solve(const std::filesystem::path& config_path, const RunOptions& options,
              std::ostream& log, std::ostream& err);

}  // namespace expint
