#include "expint/phi.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "expint/errors.hpp"

namespace expint {
namespace {

void check_order(int k) {
  if (k < 0 || k > kMaxPhiOrder) {
    throw UnsupportedError("phi order " + std::to_string(k) + " exceeds K_MAX = " +
                           std::to_string(kMaxPhiOrder));
  }
}

double inverse_factorial(int k) {
  double r = 1.0;
  for (int j = 2; j <= k; ++j) r /= j;
  return r;
}

// Σ_{j>=0} z^j / (k+j)!
double phi_taylor(int k, double z) {
  double term = inverse_factorial(k);
  double sum = term;
  for (int j = 1; j < 4000; ++j) {
    term *= z / (k + j);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && j > z) break;
  }
  return sum;
}

// For z = -w < 0 and k >= 1:
// φ_k(z) = e^z ∫_0^1 e^{wξ} ξ^{k-1}/(k-1)! dξ = e^z Σ_j w^j / (j! (k-1)! (j+k)).
// Every term is positive, so nothing cancels.
double phi_negative_series(int k, double w) {
  const double scale = inverse_factorial(k - 1);
  double power = 1.0;  // w^j / j!
  double sum = scale / k;
  for (int j = 1; j < 4000; ++j) {
    power *= w / j;
    const double term = scale * power / (j + k);
    sum += term;
    if (term <= 1e-17 * sum && j > w) break;
  }
  return std::exp(-w) * sum;
}

// φ_{j+1} = (φ_j - 1/j!)/z starting from φ_0 = e^z. Stable once |z| clearly exceeds k.
double phi_recurrence(int k, double z) {
  double value = std::exp(z);
  double inv_fact = 1.0;
  for (int j = 0; j < k; ++j) {
    value = (value - inv_fact) / z;
    inv_fact /= (j + 1);
  }
  return value;
}

constexpr double kSmallArgument = 0.5;
constexpr double kSeriesLimit = 40.0;
constexpr double kTaylorUpper = 30.0;

}  // namespace

double phi_scalar(int k, double z) {
  check_order(k);
  if (!std::isfinite(z)) throw DomainError("phi argument must be finite");
  if (k == 0) return std::exp(z);
  if (z >= -kSmallArgument) {
    return z <= kTaylorUpper ? phi_taylor(k, z) : phi_recurrence(k, z);
  }
  if (z >= -kSeriesLimit) return phi_negative_series(k, -z);
  return phi_recurrence(k, z);
}

double phi_quadrature_oracle(int k, double z, double tol) {
  if (k < 1 || k > kMaxPhiOrder) {
    throw UnsupportedError("quadrature oracle needs 1 <= k <= " + std::to_string(kMaxPhiOrder));
  }
  if (!std::isfinite(z)) throw DomainError("phi argument must be finite");
  if (!(tol >= 1e-14)) throw DomainError("quadrature tolerance must be >= 1e-14");

  using Real = long double;
  Real inv_fact = 1;
  for (int j = 2; j < k; ++j) inv_fact /= j;
  const Real zl = z;
  auto integrand = [&](Real xi) {
    return std::exp((1 - xi) * zl) * std::pow(xi, k - 1) * inv_fact;
  };
  Real error = 0;
  const Real value = boost::math::quadrature::gauss_kronrod<Real, 15>::integrate(
      integrand, Real(0), Real(1), 15, Real(1e-16), &error);
  if (!(error <= tol)) {
    throw OracleConvergenceError("quadrature did not reach tolerance " + std::to_string(tol) +
                                 " for k=" + std::to_string(k) + ", z=" + std::to_string(z));
  }
  return static_cast<double>(value);
}

PhiCombo::PhiCombo(std::initializer_list<PhiTerm> terms) {
  for (const auto& t : terms) add(t);
}

PhiCombo PhiCombo::phi(int order, double coeff, double arg_scale) {
  PhiCombo c;
  c.add({order, arg_scale, coeff});
  return c;
}

PhiCombo& PhiCombo::add(const PhiTerm& term) {
  check_order(term.order);
  if (!(term.arg_scale > 0.0) || !(term.arg_scale <= 1.0)) {
    throw ConfigError("phi term argument scale must lie in (0, 1]");
  }
  if (!std::isfinite(term.coeff)) throw ConfigError("phi term coefficient must be finite");
  terms_.push_back(term);
  return *this;
}

PhiCombo PhiCombo::scaled(double factor) const {
  PhiCombo out;
  for (auto t : terms_) {
    t.coeff *= factor;
    out.add(t);
  }
  return out;
}

double PhiCombo::operator()(double z) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.coeff * phi_scalar(t.order, t.arg_scale * z);
  return sum;
}

PhiCombo operator+(PhiCombo lhs, const PhiCombo& rhs) {
  for (const auto& t : rhs.terms_) lhs.add(t);
  return lhs;
}

double combo_eval_scalar(const PhiCombo& combo, double z) { return combo(z); }

Eigen::MatrixXd phi_dense(int k, double t, const Eigen::MatrixXd& a) {
  check_order(k);
  if (a.rows() != a.cols()) throw ShapeError("phi_dense needs a square matrix");
  const Eigen::Index n = a.rows();
  if (n + k > kDenseReferenceLimit) {
    throw ReferenceScaleError("phi_dense is limited to n + k <= " +
                              std::to_string(kDenseReferenceLimit));
  }
  if (!std::isfinite(t) || !a.allFinite()) throw DomainError("phi_dense needs finite input");
  if (k == 0) return (t * a).exp();

  // [[tA, I, 0, ...], [0, 0, I, ...], ..., [0, ..., 0]] with k+1 block rows; the
  // top-right block of its exponential is φ_k(tA).
  const Eigen::Index size = n * (k + 1);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
  w.topLeftCorner(n, n) = t * a;
  for (int b = 0; b < k; ++b) {
    w.block(b * n, (b + 1) * n, n, n).setIdentity();
  }
  const Eigen::MatrixXd e = w.exp();
  return e.topRightCorner(n, n);
}

}  // namespace expint
