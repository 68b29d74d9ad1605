#include <doctest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "expint/errors.hpp"
#include "expint/operators.hpp"
#include "expint/phi.hpp"

using namespace expint;

namespace {

double inv_factorial(int k) {
  double r = 1.0;
  for (int j = 2; j <= k; ++j) r /= j;
  return r;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("phi_scalar") {
  TEST_CASE("closed-form examples") {
    CHECK(phi_scalar(0, 0.0) == 1.0);
    CHECK(phi_scalar(2, 0.0) == 0.5);
    CHECK(rel_err(phi_scalar(1, -2.0), 0.43233235838169365) <= 1e-15);
    CHECK(rel_err(phi_scalar(2, -1.0), std::exp(-1.0)) <= 1e-15);
    CHECK(rel_err(phi_scalar(1, 1.0), std::exp(1.0) - 1.0) <= 1e-15);
  }

  TEST_CASE("invalid order and argument") {
    CHECK_THROWS_AS(phi_scalar(kMaxPhiOrder + 1, 0.0), UnsupportedError);
    CHECK_THROWS_AS(phi_scalar(-1, 0.0), UnsupportedError);
    CHECK_THROWS_AS(phi_scalar(1, std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(phi_scalar(1, std::numeric_limits<double>::infinity()), DomainError);
  }

  TEST_CASE("recurrence holds away from zero") {
    double worst = 0.0;
    for (int k = 0; k < kMaxPhiOrder; ++k) {
      for (int i = 0; i <= 120; ++i) {
        const double mag = std::pow(10.0, -4.0 + i * (std::log10(700.0) + 4.0) / 120.0);
        for (double z : {mag, -mag}) {
          const double lhs = phi_scalar(k + 1, z);
          const double rhs = (phi_scalar(k, z) - inv_factorial(k)) / z;
          worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
      }
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("continuity at the removable singularity") {
    for (int k = 1; k <= kMaxPhiOrder; ++k) {
      for (double z : {1e-6, -1e-6, 1e-9, -1e-12, 3e-7}) {
        CHECK(std::abs(phi_scalar(k, z) - inv_factorial(k)) <= 2.0 * std::abs(z));
      }
    }
  }

  TEST_CASE("positive and bounded on the negative axis") {
    for (int k = 1; k <= kMaxPhiOrder; ++k) {
      for (double z = -1.0; z >= -700.0; z *= 1.3) {
        const double v = phi_scalar(k, z);
        CHECK(v > 0.0);
        CHECK(v <= inv_factorial(k));
      }
    }
  }

  TEST_CASE("agrees with the quadrature oracle on [-100, 5]") {
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
      for (int i = 0; i < 200; ++i) {
        const double z = -100.0 + 105.0 * i / 199.0;
        worst = std::max(worst, rel_err(phi_scalar(k, z), phi_quadrature_oracle(k, z, 1e-14)));
      }
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("accuracy over the full range against the oracle") {
    for (int k = 1; k <= kMaxPhiOrder; ++k) {
      for (double z : {-700.0, -300.0, -45.0, -39.0, -12.5, -0.6, -0.4, 0.3, 7.0, 29.0, 30.0}) {
        const double v = phi_scalar(k, z);
        const double oracle = phi_quadrature_oracle(k, z, 1e-14 * std::max(1.0, std::abs(v)));
        CHECK(rel_err(v, oracle) <= 1e-13);
      }
    }
  }
}

TEST_SUITE("phi_quadrature_oracle") {
  TEST_CASE("examples") {
    CHECK(std::abs(phi_quadrature_oracle(1, 0.0, 1e-12) - 1.0) <= 1e-12);
    CHECK(std::abs(phi_quadrature_oracle(1, 1.0, 1e-12) - (std::exp(1.0) - 1.0)) <= 1e-12);
    CHECK(std::abs(phi_quadrature_oracle(3, -10.0, 1e-12) - phi_scalar(3, -10.0)) <= 1e-11);
  }

  TEST_CASE("preconditions") {
    CHECK_THROWS_AS(phi_quadrature_oracle(0, 1.0, 1e-12), UnsupportedError);
    CHECK_THROWS_AS(phi_quadrature_oracle(9, 1.0, 1e-12), UnsupportedError);
    CHECK_THROWS_AS(phi_quadrature_oracle(1, 1.0, 1e-15), DomainError);
  }

  TEST_CASE("unreachable tolerance reports non-convergence") {
    // φ₁(30) ≈ 3.5e11: an absolute error of 1e-14 is below double resolution of the value.
    CHECK_THROWS_AS(phi_quadrature_oracle(1, 30.0, 1e-14), OracleConvergenceError);
  }
}

TEST_SUITE("PhiCombo") {
  TEST_CASE("examples") {
    CHECK(combo_eval_scalar(PhiCombo::phi(1), 0.0) == 1.0);
    const PhiCombo b1 = PhiCombo::phi(1) + PhiCombo::phi(2, -2.0);
    CHECK(combo_eval_scalar(b1, 0.0) == 0.0);
    const PhiCombo a21 = PhiCombo::phi(1, 0.5, 0.5);
    CHECK(rel_err(combo_eval_scalar(a21, -2.0), 0.5 * (1.0 - std::exp(-1.0))) <= 1e-15);
    CHECK(rel_err(combo_eval_scalar(a21, -2.0), 0.31606027941427883) <= 1e-15);
  }

  TEST_CASE("empty combination is zero") {
    const PhiCombo empty;
    CHECK(empty.empty());
    CHECK(combo_eval_scalar(empty, -3.0) == 0.0);
  }

  TEST_CASE("term validation") {
    CHECK_THROWS_AS(PhiCombo::phi(kMaxPhiOrder + 1), UnsupportedError);
    CHECK_THROWS_AS(PhiCombo::phi(1, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(PhiCombo::phi(1, 1.0, 1.5), ConfigError);
    CHECK_THROWS_AS(PhiCombo::phi(1, std::numeric_limits<double>::infinity()), ConfigError);
  }

  TEST_CASE("finite everywhere on the real line") {
    const PhiCombo c{{1, 1.0, 1.0}, {2, 0.5, -4.0}, {8, 0.25, 3.0}};
    for (double z : {-700.0, -1.0, 0.0, 1e-8, 30.0, 200.0}) CHECK(std::isfinite(c(z)));
  }

  TEST_CASE("scaling multiplies every coefficient") {
    const PhiCombo c = (PhiCombo::phi(1) + PhiCombo::phi(2, 3.0)).scaled(-2.0);
    CHECK(rel_err(c(-1.5), -2.0 * (phi_scalar(1, -1.5) + 3.0 * phi_scalar(2, -1.5))) <= 1e-15);
  }
}

TEST_SUITE("phi_apply_spectral") {
  TEST_CASE("unit multiplier is the identity") {
    const SpectralOperator op = laplacian_1d_dirichlet(8, 1.0);
    const State v = State::LinSpaced(7, -1.0, 2.0);
    const State w = apply_spectral_multiplier(op, Eigen::VectorXd::Ones(7), v);
    CHECK((w - v).cwiseAbs().maxCoeff() <= 1e-14);
  }

  TEST_CASE("single eigenvalue -8") {
    const SpectralOperator op = laplacian_1d_dirichlet(2, 1.0);
    const State w = phi_apply_spectral(1, 1.0, op, State::Ones(1));
    CHECK(rel_err(w[0], (1.0 - std::exp(-8.0)) / 8.0) <= 1e-15);
  }

  TEST_CASE("agrees with phi_dense at N=8") {
    const SpectralOperator op = laplacian_1d_dirichlet(8, 1.0);
    const State v = State::LinSpaced(7, 0.1, 0.7).array().sin();
    const State dense = phi_dense(2, 0.5, to_dense(op)) * v;
    CHECK((phi_apply_spectral(2, 0.5, op, v) - dense).cwiseAbs().maxCoeff() <= 1e-10);
  }

  TEST_CASE("backend equivalence on built-in operators up to dimension 64") {
    std::srand(5);
    double worst = 0.0;
    for (int n : {2, 4, 8, 16, 32, 65}) {
      const SpectralOperator op = laplacian_1d_dirichlet(n, 0.3);
      const State v = State::Random(static_cast<Eigen::Index>(op.size()));
      for (int k = 0; k <= 3; ++k) {
        const State dense = phi_dense(k, 0.01, to_dense(op)) * v;
        worst = std::max(worst, (phi_apply_spectral(k, 0.01, op, v) - dense).cwiseAbs().maxCoeff());
      }
    }
    for (int n : {2, 3, 5, 9}) {
      const SplitOperator split = split_laplacian_2d(n, 1.0);
      for (const SpectralOperator* op : {&split.a1, &split.a2, &split.full}) {
        const State v = State::Random(static_cast<Eigen::Index>(op->size()));
        for (int k = 0; k <= 2; ++k) {
          const State dense = phi_dense(k, 0.05, to_dense(*op)) * v;
          worst = std::max(worst, (phi_apply_spectral(k, 0.05, *op, v) - dense).cwiseAbs().maxCoeff());
        }
      }
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("shape mismatch") {
    const SpectralOperator op = laplacian_1d_dirichlet(8, 1.0);
    CHECK_THROWS_AS(phi_apply_spectral(1, 1.0, op, State::Ones(3)), ShapeError);
  }

  TEST_CASE("bit-for-bit deterministic") {
    const SpectralOperator op = laplacian_1d_dirichlet(200, 1.0);
    const State v = State::LinSpaced(199, 0.0, 1.0).array().square();
    const State a = phi_apply_spectral(2, 0.1, op, v);
    const State b = phi_apply_spectral(2, 0.1, op, v);
    CHECK(a == b);
  }
}

TEST_SUITE("phi_dense") {
  TEST_CASE("examples") {
    CHECK(phi_dense(0, 1.0, Eigen::MatrixXd::Zero(3, 3)).isApprox(Eigen::MatrixXd::Identity(3, 3)));
    const Eigen::MatrixXd m = phi_dense(1, 1.0, Eigen::MatrixXd::Constant(1, 1, -2.0));
    CHECK(rel_err(m(0, 0), (1.0 - std::exp(-2.0)) / 2.0) <= 1e-14);
  }

  TEST_CASE("symmetric 2x2 against an eigendecomposition") {
    Eigen::MatrixXd a(2, 2);
    a << -3.0, 1.0, 1.0, -2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    Eigen::VectorXd d(2);
    for (int i = 0; i < 2; ++i) d[i] = phi_scalar(2, eig.eigenvalues()[i]);
    const Eigen::MatrixXd ref = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
    CHECK((phi_dense(2, 1.0, a) - ref).norm() <= 1e-11 * ref.norm());
  }

  TEST_CASE("relative accuracy for ||tA|| up to 100") {
    const SpectralOperator op = laplacian_1d_dirichlet(16, 1.0);
    const Eigen::MatrixXd a = to_dense(op);
    const double t = 100.0 / a.norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t * a);
    for (int k = 0; k <= 4; ++k) {
      Eigen::VectorXd d(a.rows());
      for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = phi_scalar(k, eig.eigenvalues()[i]);
      const Eigen::MatrixXd ref = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
      CHECK((phi_dense(k, t, a) - ref).norm() <= 1e-11 * ref.norm());
    }
  }

  TEST_CASE("reference-scale limit") {
    CHECK_THROWS_AS(phi_dense(3, 1.0, Eigen::MatrixXd::Zero(510, 510)), ReferenceScaleError);
    CHECK_THROWS_AS(phi_dense(1, 1.0, Eigen::MatrixXd::Zero(2, 3)), ShapeError);
    CHECK_THROWS_AS(phi_dense(9, 1.0, Eigen::MatrixXd::Zero(2, 2)), UnsupportedError);
  }
}
