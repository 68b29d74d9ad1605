#include "expint/operators.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "expint/errors.hpp"
#include "expint/phi.hpp"

namespace expint {
namespace {

constexpr int kDenseTransformLimit = 64;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void check_shape(const Grid& grid, const State& v) {
  if (static_cast<std::size_t>(v.size()) != grid.size()) {
    throw ShapeError("state has " + std::to_string(v.size()) + " entries, grid has " +
                     std::to_string(grid.size()));
  }
}

// (v_{i-1} - 2 v_i + v_{i+1}) along one axis with stride, zero ghosts.
void add_second_difference(const State& v, State& out, int m, int stride, int lines,
                           int line_stride, double scale) {
  for (int l = 0; l < lines; ++l) {
    const Eigen::Index base = static_cast<Eigen::Index>(l) * line_stride;
    for (int i = 0; i < m; ++i) {
      const Eigen::Index p = base + static_cast<Eigen::Index>(i) * stride;
      const double left = i > 0 ? v[p - stride] : 0.0;
      const double right = i + 1 < m ? v[p + stride] : 0.0;
      out[p] += scale * (left - 2.0 * v[p] + right);
    }
  }
}

Eigen::VectorXd directional_eigenvalues(const Grid& grid, double diffusivity, Axes axes) {
  const Eigen::VectorXd lam = dirichlet_eigenvalues_1d(grid.subintervals(), diffusivity);
  if (grid.dims() == 1) return lam;
  const int m = grid.points_per_dim();
  const double wx = axes != Axes::y ? 1.0 : 0.0;
  const double wy = axes != Axes::x ? 1.0 : 0.0;
  Eigen::VectorXd out(static_cast<Eigen::Index>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) out[i + m * j] = wx * lam[i] + wy * lam[j];
  }
  return out;
}

}  // namespace

Grid::Grid(int dims, int subintervals) : dims_(dims), subintervals_(subintervals) {
  if (dims != 1 && dims != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (subintervals < 2) throw ConfigError("grid needs at least 2 subintervals");
}

std::size_t Grid::size() const {
  const auto m = static_cast<std::size_t>(points_per_dim());
  return dims_ == 1 ? m : m * m;
}

struct SineTransform::FftPlan {
  fftw_plan plan = nullptr;
  double scale = 1.0;

  ~FftPlan() {
    if (plan != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

SineTransform::SineTransform(const Grid& grid, TransformBackend backend)
    : grid_(grid), backend_(backend) {
  const int n = grid.subintervals();
  const int m = grid.points_per_dim();
  if (backend_ == TransformBackend::automatic) {
    backend_ = n <= kDenseTransformLimit ? TransformBackend::dense : TransformBackend::fft;
  }
  if (backend_ == TransformBackend::dense) {
    const double norm = std::sqrt(2.0 / n);
    matrix_.resize(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        matrix_(i, j) = norm * std::sin(std::numbers::pi * (i + 1) * (j + 1) / n);
      }
    }
    return;
  }

  plan_ = std::make_unique<FftPlan>();
  std::vector<double> scratch(grid.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  {
    std::lock_guard lock(fftw_planner_mutex());
    if (grid.dims() == 1) {
      plan_->plan = fftw_plan_r2r_1d(m, scratch.data(), scratch.data(), FFTW_RODFT00, flags);
    } else {
      plan_->plan = fftw_plan_r2r_2d(m, m, scratch.data(), scratch.data(), FFTW_RODFT00,
                                     FFTW_RODFT00, flags);
    }
  }
  if (plan_->plan == nullptr) throw Error("FFTW could not plan a sine transform");
  // RODFT00 is unnormalized with a factor 2 per axis relative to Σ sin(...).
  const double axis_scale = 1.0 / std::sqrt(2.0 * n);
  plan_->scale = grid.dims() == 1 ? axis_scale : axis_scale * axis_scale;
}

SineTransform::~SineTransform() = default;

State SineTransform::apply(const State& v) const {
  check_shape(grid_, v);
  const int m = grid_.points_per_dim();
  if (backend_ == TransformBackend::dense) {
    if (grid_.dims() == 1) return matrix_ * v;
    Eigen::Map<const Eigen::MatrixXd> in(v.data(), m, m);
    State out(v.size());
    Eigen::Map<Eigen::MatrixXd> out_mat(out.data(), m, m);
    const Eigen::MatrixXd tmp = matrix_ * in;
    out_mat.noalias() = tmp * matrix_;
    return out;
  }
  State out = v;
  fftw_execute_r2r(plan_->plan, out.data(), out.data());
  out *= plan_->scale;
  return out;
}

Eigen::VectorXd dirichlet_eigenvalues_1d(int subintervals, double diffusivity) {
  const int m = subintervals - 1;
  const double h = 1.0 / subintervals;
  Eigen::VectorXd lam(m);
  for (int j = 1; j <= m; ++j) {
    const double s = std::sin(j * std::numbers::pi / (2.0 * subintervals));
    lam[j - 1] = -(4.0 * diffusivity / (h * h)) * s * s;
  }
  return lam;
}

SpectralOperator::SpectralOperator(const Grid& grid, double diffusivity, Axes axes,
                                   TransformBackend backend)
    : grid_(grid), diffusivity_(diffusivity), axes_(axes) {
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) {
    throw ConfigError("diffusivity must be positive and finite");
  }
  if (grid.dims() == 1 && axes != Axes::x) {
    throw ConfigError("a 1D operator can only act along x");
  }
  eigenvalues_ = directional_eigenvalues(grid, diffusivity, axes);
  transform_ = std::make_shared<const SineTransform>(grid, backend);
}

State SpectralOperator::forward(const State& v) const { return transform_->apply(v); }

State SpectralOperator::backward(const State& coeffs) const { return transform_->apply(coeffs); }

State SpectralOperator::apply(const State& v) const {
  check_shape(grid_, v);
  const int m = grid_.points_per_dim();
  const double scale = diffusivity_ / (grid_.h() * grid_.h());
  State out = State::Zero(v.size());
  if (grid_.dims() == 1) {
    add_second_difference(v, out, m, 1, 1, 0, scale);
    return out;
  }
  if (axes_ != Axes::y) add_second_difference(v, out, m, 1, m, m, scale);
  if (axes_ != Axes::x) add_second_difference(v, out, m, m, m, 1, scale);
  return out;
}

SpectralOperator SpectralOperator::restricted_to(Axes axes) const {
  SpectralOperator copy = *this;
  if (grid_.dims() == 1 && axes != Axes::x) {
    throw ConfigError("a 1D operator can only act along x");
  }
  copy.axes_ = axes;
  copy.eigenvalues_ = directional_eigenvalues(grid_, diffusivity_, axes);
  return copy;
}

SpectralOperator laplacian_1d_dirichlet(int subintervals, double diffusivity,
                                        TransformBackend backend) {
  if (subintervals < 2 || subintervals > 4096) {
    throw ConfigError("1D Laplacian needs 2 <= N <= 4096, got " + std::to_string(subintervals));
  }
  return SpectralOperator(Grid(1, subintervals), diffusivity, Axes::x, backend);
}

SplitOperator split_laplacian_2d(int subintervals, double diffusivity, TransformBackend backend) {
  if (subintervals < 2 || subintervals > 512) {
    throw ConfigError("2D Laplacian needs 2 <= N <= 512, got " + std::to_string(subintervals));
  }
  SpectralOperator full(Grid(2, subintervals), diffusivity, Axes::xy, backend);
  SpectralOperator a1 = full.restricted_to(Axes::x);
  SpectralOperator a2 = full.restricted_to(Axes::y);
  return SplitOperator{std::move(a1), std::move(a2), std::move(full)};
}

State apply_operator(const SpectralOperator& op, const State& v) { return op.apply(v); }

Eigen::MatrixXd to_dense(const SpectralOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd a(n, n);
  State e = State::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    a.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return a;
}

State sine_mode(const Grid& grid, std::size_t mode) {
  if (mode >= grid.size()) throw ShapeError("sine mode index out of range");
  const int n = grid.subintervals();
  const int m = grid.points_per_dim();
  const double norm = std::sqrt(2.0 / n);
  auto mode_1d = [&](int j, int i) {
    return norm * std::sin(std::numbers::pi * (j + 1) * (i + 1) / n);
  };
  State v(grid.size());
  if (grid.dims() == 1) {
    for (int i = 0; i < m; ++i) v[i] = mode_1d(static_cast<int>(mode), i);
    return v;
  }
  const int jx = static_cast<int>(mode % m);
  const int jy = static_cast<int>(mode / m);
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) v[ix + m * iy] = mode_1d(jx, ix) * mode_1d(jy, iy);
  }
  return v;
}

State apply_spectral_multiplier(const SpectralOperator& op, const Eigen::VectorXd& multiplier,
                                const State& v) {
  if (multiplier.size() != static_cast<Eigen::Index>(op.size())) {
    throw ShapeError("spectral multiplier does not match the operator");
  }
  State coeffs = op.forward(v);
  coeffs.array() *= multiplier.array();
  return op.backward(coeffs);
}

State phi_apply_spectral(int k, double t, const SpectralOperator& op, const State& v) {
  check_shape(op.grid(), v);
  const Eigen::VectorXd& lam = op.eigenvalues();
  Eigen::VectorXd mult(lam.size());
  for (Eigen::Index j = 0; j < lam.size(); ++j) mult[j] = phi_scalar(k, t * lam[j]);
  return apply_spectral_multiplier(op, mult, v);
}

State gradient_2d(const Grid& grid, const State& v, Direction direction) {
  if (grid.dims() != 2) throw ShapeError("gradient_2d needs a 2D grid");
  check_shape(grid, v);
  const int m = grid.points_per_dim();
  const double inv = 1.0 / (2.0 * grid.h());
  State out(v.size());
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      double forward = 0.0;
      double backward = 0.0;
      if (direction == Direction::x) {
        forward = i + 1 < m ? v[(i + 1) + m * j] : 0.0;
        backward = i > 0 ? v[(i - 1) + m * j] : 0.0;
      } else {
        forward = j + 1 < m ? v[i + m * (j + 1)] : 0.0;
        backward = j > 0 ? v[i + m * (j - 1)] : 0.0;
      }
      out[i + m * j] = (forward - backward) * inv;
    }
  }
  return out;
}

State gradient_1d(const Grid& grid, const State& v) {
  if (grid.dims() != 1) throw ShapeError("gradient_1d needs a 1D grid");
  check_shape(grid, v);
  const int m = grid.points_per_dim();
  const double inv = 1.0 / (2.0 * grid.h());
  State out(v.size());
  for (int i = 0; i < m; ++i) {
    const double forward = i + 1 < m ? v[i + 1] : 0.0;
    const double backward = i > 0 ? v[i - 1] : 0.0;
    out[i] = (forward - backward) * inv;
  }
  return out;
}

}  // namespace expint
