#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "expint/analysis.hpp"
#include "expint/integrators.hpp"
#include "expint/problems.hpp"

namespace expint {

inline constexpr int kSchemaVersion = 1;

/// Environment variable naming the output directory when neither --out nor the
/// config's output block sets one.
inline constexpr const char* kOutputDirEnv = "EXPINT_OUTPUT_DIR";

struct ProblemConfig {
  std::string name = "allen_cahn";  // linear_forced | heat | allen_cahn | burgers
  int dims = 2;
  int N = 64;
  double epsilon = 0.1;  // allen_cahn: diffusivity ε²
  double nu = 0.05;      // heat, linear_forced, burgers
  InitialDataSpec u0;
  double g0 = 0.0;  // linear_forced: spatially constant forcing g₀ + g₁t
  double g1 = 0.0;

  double diffusivity() const;
};

struct StudyConfig {
  double T = 0.1;
  std::vector<double> taus;
  std::vector<NormKind> norms;
  ReferenceSpec reference;
};

struct SolveConfig {
  double T = 0.1;
  double tau = 0.01;
  int snapshots = 0;
};

struct DefectConfig {
  int N = 32;
  double nu = 1.0;
  int k = 1;
  std::vector<double> ts;
  InitialDataSpec v;
  double beta1 = 1.0;
};

struct OutputConfig {
  std::string directory;
  std::vector<std::string> formats{"csv"};
};

enum class Command { converge, defect, solve };

std::string to_string(Command command);

/**
 * One experiment, parsed from a Boost INFO file:
 *
 *     schema_version 1
 *     problem { name allen_cahn  dims 2  N 64  epsilon 0.1  u0 { kind pyramid } }
 *     scheme  { name expeuler  c2 0.5 }
 *     study   { T 0.1  tau_max 0.025  levels 7  norms "max c1"
 *               reference { kind fine_step  refinement 32 } }
 *     output  { directory out/allen_cahn }
 *
 * The full grammar is documented in configs/README.md.
 */
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  Command command = Command::converge;
  ProblemConfig problem;
  SchemeSpec scheme;
  StudyConfig study;
  SolveConfig solve;
  DefectConfig defect;
  OutputConfig output;
};

/// Parse and validate against the schema of `command`. Unknown keys, missing
/// required keys and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const std::string& text, Command command);

/// Read a config file; IoError if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path, Command command);

/// Canonical INFO text with every default resolved; parse_config accepts it back.
std::string echo_config(const ExperimentConfig& config);

/// 64-bit FNV-1a of echo_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Problem described by the problem block; 2D problems carry a split operator.
Problem build_problem(const ProblemConfig& config);

}  // namespace expint
