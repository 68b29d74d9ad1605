#pragma once

#include <cstddef>
#include <memory>

#include <Eigen/Dense>

namespace expint {

using State = Eigen::VectorXd;

/// Uniform grid on (0,1)^dims with N subintervals per axis and zero Dirichlet
/// boundary. States hold interior values only, x index fastest in 2D.
class Grid {
 public:
  Grid(int dims, int subintervals);

  int dims() const { return dims_; }
  int subintervals() const { return subintervals_; }
  int points_per_dim() const { return subintervals_ - 1; }
  std::size_t size() const;
  double h() const { return 1.0 / subintervals_; }
  /// Coordinate of interior node i (0-based) along any axis.
  double coordinate(int i) const { return (i + 1) * h(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dims_;
  int subintervals_;
};

enum class TransformBackend { automatic, dense, fft };

/// Orthonormal type-I sine transform along every axis of a grid. The transform
/// is symmetric and its own inverse. Dense matrix product for N <= 64, FFTW above.
class SineTransform {
 public:
  SineTransform(const Grid& grid, TransformBackend backend = TransformBackend::automatic);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  const Grid& grid() const { return grid_; }
  TransformBackend backend() const { return backend_; }

  State apply(const State& v) const;

 private:
  struct FftPlan;

  Grid grid_;
  TransformBackend backend_;
  Eigen::MatrixXd matrix_;
  std::unique_ptr<FftPlan> plan_;
};

/// Which coordinate directions the stencil acts along.
enum class Axes { x, y, xy };

/// Finite-difference Dirichlet Laplacian ν·Δ (or one of its directional parts),
/// diagonalized by the sine transform of its grid.
class SpectralOperator {
 public:
  SpectralOperator(const Grid& grid, double diffusivity, Axes axes,
                   TransformBackend backend = TransformBackend::automatic);

  const Grid& grid() const { return grid_; }
  double diffusivity() const { return diffusivity_; }
  Axes axes() const { return axes_; }
  std::size_t size() const { return grid_.size(); }

  /// Eigenvalues in the mode order produced by forward(); all nonpositive.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  State forward(const State& v) const;
  State backward(const State& coeffs) const;

  /// Nodal matvec by the stencil with zero ghost values.
  State apply(const State& v) const;

  /// Same grid and transform, different stencil directions.
  SpectralOperator restricted_to(Axes axes) const;

 private:
  Grid grid_;
  double diffusivity_;
  Axes axes_;
  Eigen::VectorXd eigenvalues_;
  std::shared_ptr<const SineTransform> transform_;
};

/// Commuting directional pair on a 2D grid and their Kronecker sum.
struct SplitOperator {
  SpectralOperator a1;  // along x
  SpectralOperator a2;  // along y
  SpectralOperator full;
};

/// Eigenvalues -(4ν/h²) sin²(jπ/(2N)), j = 1..N-1.
Eigen::VectorXd dirichlet_eigenvalues_1d(int subintervals, double diffusivity);

SpectralOperator laplacian_1d_dirichlet(int subintervals, double diffusivity,
                                        TransformBackend backend = TransformBackend::automatic);
SplitOperator split_laplacian_2d(int subintervals, double diffusivity,
                                 TransformBackend backend = TransformBackend::automatic);

State apply_operator(const SpectralOperator& op, const State& v);

/// Stencil matrix of op, for reference computations on small grids.
Eigen::MatrixXd to_dense(const SpectralOperator& op);

/// Nodal values of the orthonormal sine eigenvector with the given mode index
/// (same ordering as eigenvalues()).
State sine_mode(const Grid& grid, std::size_t mode);

/// Backward(m ⊙ forward(v)) for a multiplier m indexed like eigenvalues().
State apply_spectral_multiplier(const SpectralOperator& op, const Eigen::VectorXd& multiplier,
                                const State& v);

/// φ_k(tA)v through the sine transform.
State phi_apply_spectral(int k, double t, const SpectralOperator& op, const State& v);

enum class Direction { x, y };

/// Centered difference (v_{i+1} - v_{i-1})/(2h) along one axis of a 2D state,
/// with zero boundary values.
State gradient_2d(const Grid& grid, const State& v, Direction direction);

/// 1D counterpart of gradient_2d.
State gradient_1d(const Grid& grid, const State& v);

}  // namespace expint
