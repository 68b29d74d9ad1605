#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "expint/operators.hpp"

namespace expint {

using Nonlinearity = std::function<State(double t, const State& u)>;
using ExactSolution = std::function<State(double t)>;

/// u' = Au + f(t, u), u(0) = u0. split is present when A = A₁ + A₂ is available
/// in factorized form; op is then split->full.
struct Problem {
  std::string label;
  SpectralOperator op;
  std::optional<SplitOperator> split;
  Nonlinearity f;
  State u0;
  std::optional<ExactSolution> exact;

  const Grid& grid() const { return op.grid(); }
};

enum class InitialKind { hat, pyramid, fourier_decay, smooth_compatible };

struct InitialDataSpec {
  InitialKind kind = InitialKind::smooth_compatible;
  double gamma = 0.5;       // fourier_decay only
  std::uint64_t seed = 1;   // fourier_decay only
};

InitialKind parse_initial_kind(const std::string& name);
std::string to_string(InitialKind kind);

/**
 * Initial data on the interior nodes of grid. Every kind vanishes on the boundary
 * and has max norm at most 1.
 *
 * - hat: tent 1 - 2|x - 1/2|, tensorized in 2D
 * - pyramid: 1 - 2 max(|x - 1/2|, |y - 1/2|) (equals hat in 1D)
 * - fourier_decay: Σ_j ξ_j j^{-(2γ+1)} sin(jπx) with ξ_j uniform in [-1,1],
 *   tensorized in 2D with an independent draw per axis, scaled to max norm 1
 * - smooth_compatible: 0.9 sin(πx) (times sin(πy) in 2D)
 */
State make_initial_data(const InitialDataSpec& spec, const Grid& grid);

/// u' = Au + g₀ + g₁t with exact solution e^{tA}u₀ + tφ₁(tA)g₀ + t²φ₂(tA)g₁.
/// forcing holds the coefficients g₀ (and optionally g₁); higher degree is unsupported.
Problem linear_forced_problem(const SpectralOperator& op, const std::vector<State>& forcing,
                              const State& u0);

/// Heat equation (f ≡ 0) with its exact semigroup solution.
Problem heat_problem(const SpectralOperator& op, const State& u0);
Problem heat_problem(const SplitOperator& op, const State& u0);

/// Allen-Cahn: f(u) = u - u³ pointwise; the diffusivity ε² lives in op.
Problem allen_cahn(const SpectralOperator& op, const InitialDataSpec& u0);
Problem allen_cahn(const SplitOperator& op, const InitialDataSpec& u0);

/// Viscous Burgers': f(u) = -u ⊙ (∂ₓu + ∂ᵧu) with centered differences; ν lives in op.
Problem burgers(const SplitOperator& op, const InitialDataSpec& u0);

State allen_cahn_nonlinearity(const State& u);
State burgers_nonlinearity(const Grid& grid, const State& u);

}  // namespace expint
