#pragma once

#include <span>
#include <string>
#include <vector>

#include "expint/phi.hpp"

namespace expint {

/// Explicit exponential Runge-Kutta method with weights b_i(z) and a_ij(z)
/// given as φ-combinations. a is strictly lower triangular: a[i] holds the
/// i entries a_{i,0..i-1}.
struct ExpRkTableau {
  std::string label;
  std::vector<double> c;
  std::vector<PhiCombo> b;
  std::vector<std::vector<PhiCombo>> a;
  int order = 1;

  int stages() const { return static_cast<int>(c.size()); }
};

/// prefactor * first(τA₁) * second(τA₂)
struct SplitProduct {
  double prefactor = 1.0;
  PhiCombo first;
  PhiCombo second;
};

/// Sum of factorized products.
using SplitWeight = std::vector<SplitProduct>;

double eval_split_weight(const SplitWeight& weight, double z1, double z2);

/// Exponential Runge-Kutta method whose weights are products of φ-functions
/// of the two directional operators.
struct SplitTableau {
  std::string label;
  std::vector<double> c;
  std::vector<SplitWeight> b;
  std::vector<std::vector<SplitWeight>> a;
  int order = 1;

  int stages() const { return static_cast<int>(c.size()); }
};

ExpRkTableau tableau_exponential_euler();

/// Two-stage second-order method: b₁ = φ₁ - φ₂/c₂, b₂ = φ₂/c₂, a₂₁ = c₂φ₁(c₂·).
ExpRkTableau tableau_erk2(double c2 = 0.5);

/// Split exponential Euler: b₁ = φ₁(τA₁)φ₁(τA₂).
SplitTableau tableau_split_euler();

/// ERK2L: b₁ = φ₁φ₁ - (2/c₂)φ₂φ₂, b₂ = (2/c₂)φ₂φ₂, a₂₁ = c₂φ₁(c₂τA₁)φ₁(c₂τA₂).
SplitTableau tableau_erk2l(double c2 = 0.5);

struct OrderConditionReport {
  int order = 1;
  /// max_z |Σ b_i(z) - φ₁(z)|
  double first = 0.0;
  /// max_z |Σ b_i(z) c_i - φ₂(z)|, order 2 only
  double second = 0.0;
  /// max_z |Σ_j a_ij(z) - c_i φ₁(c_i z)| for each stage i >= 2, order 2 only
  std::vector<double> stages;

  double max_residual() const;
};

OrderConditionReport check_order_conditions(const ExpRkTableau& tableau, int order,
                                            std::span<const double> z_samples);

}  // namespace expint
