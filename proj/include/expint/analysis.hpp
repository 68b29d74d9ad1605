#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expint/integrators.hpp"
#include "expint/operators.hpp"
#include "expint/problems.hpp"

namespace expint {

enum class NormType { max, c1_discrete, holder };

/**
 * Discrete norm selector.
 *
 * max: largest nodal magnitude. c1_discrete: max norm plus the larger of the
 * centered-difference gradient max norms. holder: sup |v(x) - v(y)| / |x - y|^exponent
 * over all adjacent node pairs plus `samples` seeded random pairs; boundary nodes
 * take their Dirichlet value 0.
 */
struct NormKind {
  NormType type = NormType::max;
  double exponent = 1.0;
  int samples = 2000;
  std::uint64_t seed = 1;

  static NormKind max_norm() { return {}; }
  static NormKind c1_discrete() { return {NormType::c1_discrete}; }
  /// Throws ConfigError unless exponent ∈ (0, 2) and samples >= 100.
  static NormKind holder(double exponent, int samples = 2000, std::uint64_t seed = 1);

  std::string name() const;
};

double norm(const State& v, const NormKind& kind, const Grid& grid);

/// Hölder quotient over every pair of nodes (boundary included). Grids with N <= 16 only.
double holder_quotient_exhaustive(const State& v, double exponent, const Grid& grid);

/// Tolerance below which an error is treated as round-off.
inline constexpr double kNoiseFloor = 1e-13;

struct FitResult {
  double order = 0.0;     // slope of log(error) against log(tau)
  double r2 = 0.0;
  double residual = 0.0;  // RMS residual of the log-log fit
  int points = 0;
};

/// Least-squares fit of error ≈ C τ^p. Non-finite or nonpositive errors are skipped.
/// Throws InsufficientDataError with fewer than 3 usable points and NoiseFloorError
/// if any usable error is at or below kNoiseFloor.
FitResult fit_order(std::span<const double> taus, std::span<const double> errors);

struct ReferenceSpec {
  enum class Kind { exact, fine_step };
  Kind kind = Kind::fine_step;
  /// Defaults to erk2 for unsplit schemes and erk2l for split schemes.
  std::optional<SchemeKind> scheme;
  int refinement = 32;
};

/// erk2 or erk2l, matching whether the scheme is split.
SchemeKind reference_family(SchemeKind scheme);

struct NormSeries {
  NormKind kind;
  std::vector<double> errors;  // NaN where the run diverged
  std::optional<FitResult> fit;
  std::string flag;            // empty, "noise_floor" or "insufficient_data"
};

struct ConvergenceReport {
  std::string problem;
  std::string scheme;
  double T = 0.0;
  std::vector<double> taus;
  std::vector<NormSeries> norms;
  std::vector<double> runtime_ms;
  std::vector<long> divergence_step;  // -1 where the run completed
  std::string reference;              // e.g. "exact" or "erk2 tau_ref=..."
  double reference_tau = 0.0;

  bool any_diverged() const;
  const NormSeries* series(NormType type) const;
};

struct StudyOptions {
  int threads = 1;
  /// Skip the reference solve when the caller already has the reference state at T.
  std::optional<State> reference_state;
};

/// Reference state at T for a study whose smallest step is tau_min.
State compute_reference(const Problem& problem, const SchemeSpec& scheme,
                        const ReferenceSpec& reference, double tau_min, double T);

std::string describe_reference(const SchemeSpec& scheme, const ReferenceSpec& reference,
                               double tau_min);

/// Errors at T for each step size against the reference, plus rate fits.
/// Divergent runs are recorded, excluded from the fits, and do not throw.
ConvergenceReport run_convergence_study(const Problem& problem, const SchemeSpec& scheme,
                                        std::span<const double> taus, double T,
                                        std::span<const NormKind> norms,
                                        const ReferenceSpec& reference,
                                        const StudyOptions& options = {});

/// T·2^{-first}, ..., T·2^{-last}
std::vector<double> dyadic_steps(double T, int first, int last);

struct DefectReport {
  std::string label;  // regularity description of v
  int k = 1;
  double beta1 = 0.0;
  std::vector<double> ts;
  std::vector<double> defects;  // ‖(φ_k(t(A₁+A₂)) - k!φ_k(tA₁)φ_k(tA₂))v‖∞ / ‖v‖∞
  std::optional<FitResult> fit;
  std::string flag;
};

double split_defect_norm(const SplitOperator& op, int k, double t, const State& v);

DefectReport split_defect_study(const SplitOperator& op, int k, const State& v, double beta1,
                                std::span<const double> ts, const std::string& label = "");

}  // namespace expint
