#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "expint/operators.hpp"
#include "expint/problems.hpp"
#include "expint/tableau.hpp"

namespace expint {

/// Stage data of one step; filled only when an observer asks for it.
struct StepRecord {
  double t_n = 0.0;
  double tau = 0.0;
  State u_n;
  std::vector<State> stages;
  std::vector<State> stage_f;
};

/**
 * One fixed-step exponential Runge-Kutta method bound to an operator and a step size.
 *
 * All weights are diagonal in the sine basis, so the φ-combinations are tabulated on
 * the spectrum once at construction and a step only transforms u_n, the stage
 * nonlinearities, and the results. Unsplit tableaus are evaluated at τ(λᵢ + μⱼ);
 * split tableaus use factorized products of τλᵢ and τμⱼ.
 */
class Stepper {
 public:
  Stepper(const ExpRkTableau& tableau, const SpectralOperator& op, double tau);
  Stepper(const SplitTableau& tableau, const SplitOperator& op, double tau);

  double tau() const { return tau_; }
  const std::string& label() const { return label_; }
  int stages() const { return static_cast<int>(c_.size()); }

  /// Throws DivergenceError (step index -1) if the new state is not finite.
  State step(const Nonlinearity& f, double t_n, const State& u_n,
             StepRecord* record = nullptr) const;

 private:
  Stepper(const SpectralOperator& op, double tau, std::string label);

  SpectralOperator op_;
  double tau_;
  std::string label_;
  std::vector<double> c_;
  Eigen::VectorXd semigroup_;                  // e^{τΛ}
  std::vector<Eigen::VectorXd> stage_semigroup_;  // e^{c_i τΛ}
  std::vector<std::vector<Eigen::VectorXd>> a_;  // τ a_ij(τΛ)
  std::vector<Eigen::VectorXd> b_;               // τ b_i(τΛ)
};

std::pair<State, StepRecord> step_eerk(const ExpRkTableau& tableau, const SpectralOperator& op,
                                       const Nonlinearity& f, double t_n, double tau,
                                       const State& u_n);

/// u_{n+1} = e^{τA₁}e^{τA₂}u_n + τφ₁(τA₁)φ₁(τA₂)f(t_n, u_n)
State step_split_euler(const SplitOperator& op, const Nonlinearity& f, double t_n, double tau,
                       const State& u_n);

std::pair<State, StepRecord> step_erk2l(const SplitTableau& tableau, const SplitOperator& op,
                                        const Nonlinearity& f, double t_n, double tau,
                                        const State& u_n);

enum class SchemeKind { expeuler, erk2, split_euler, erk2l };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::expeuler;
  double c2 = 0.5;
};

SchemeKind parse_scheme(const std::string& name);
std::string to_string(SchemeKind kind);
bool is_split(SchemeKind kind);

/// Throws ConfigError when a split scheme is requested for a problem without a split operator.
Stepper make_stepper(const SchemeSpec& scheme, const Problem& problem, double tau);

using Observer = std::function<void(long step, const StepRecord& record)>;

struct IntegrationResult {
  State state;
  long steps = 0;
};

/// Advance problem.u0 to time T with uniform steps t_n = nτ. T must be an integer
/// multiple of τ (relative tolerance 1e-9), otherwise ConfigError.
IntegrationResult integrate(const Stepper& stepper, const Problem& problem, double T,
                            const Observer& observer = {});

/// Number of steps n with nτ = T, or ConfigError.
long step_count(double T, double tau);

}  // namespace expint
