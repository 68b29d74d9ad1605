#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace expint {

/// Highest φ order supported anywhere in the library.
inline constexpr int kMaxPhiOrder = 8;

/**
 * φ_k(z) for real z.
 *
 * φ_0(z) = e^z and φ_k(z) = ∫_0^1 e^{(1-ξ)z} ξ^{k-1}/(k-1)! dξ for k >= 1,
 * so that φ_k(0) = 1/k!. Relative accuracy is about 1e-15 on [-700, 30].
 *
 * Throws UnsupportedError for k outside [0, kMaxPhiOrder] and DomainError
 * for non-finite z.
 */
double phi_scalar(int k, double z);

/// Adaptive Gauss-Kronrod evaluation of the defining integral of φ_k, k >= 1.
/// Test oracle only. Throws OracleConvergenceError if the error estimate
/// cannot be pushed below tol (which must be >= 1e-14).
double phi_quadrature_oracle(int k, double z, double tol);

/// coeff * φ_order(arg_scale * z)
struct PhiTerm {
  int order = 1;
  double arg_scale = 1.0;
  double coeff = 1.0;
};

/// Linear combination Σ coeff_i φ_{k_i}(θ_i z). The empty combination is 0.
class PhiCombo {
 public:
  PhiCombo() = default;
  PhiCombo(std::initializer_list<PhiTerm> terms);

  static PhiCombo phi(int order, double coeff = 1.0, double arg_scale = 1.0);

  PhiCombo& add(const PhiTerm& term);
  PhiCombo scaled(double factor) const;

  std::span<const PhiTerm> terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double operator()(double z) const;

  friend PhiCombo operator+(PhiCombo lhs, const PhiCombo& rhs);

 private:
  std::vector<PhiTerm> terms_;
};

double combo_eval_scalar(const PhiCombo& combo, double z);

/// Maximum n + k accepted by phi_dense.
inline constexpr int kDenseReferenceLimit = 512;

/// φ_k(tA) as a dense matrix, computed as a block of the exponential of an
/// augmented block-upper-triangular matrix. Reference backend only.
Eigen::MatrixXd phi_dense(int k, double t, const Eigen::MatrixXd& a);

}  // namespace expint
