#include "expint/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "expint/errors.hpp"

namespace expint {
namespace {

double tent(double x) { return 1.0 - 2.0 * std::abs(x - 0.5); }

// Uniform in [-1, 1) from the top 53 bits, identical on every platform.
double uniform_symmetric(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

Eigen::VectorXd fourier_profile(const Grid& grid, double gamma, std::mt19937_64& rng) {
  const int m = grid.points_per_dim();
  Eigen::VectorXd coeff(m);
  for (int j = 1; j <= m; ++j) coeff[j - 1] = uniform_symmetric(rng) * std::pow(j, -(2.0 * gamma + 1.0));
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    const double x = grid.coordinate(i);
    for (int j = 1; j <= m; ++j) g[i] += coeff[j - 1] * std::sin(j * std::numbers::pi * x);
  }
  const double peak = g.cwiseAbs().maxCoeff();
  if (peak > 0.0) g /= peak;
  return g;
}

Problem heat_from(const SpectralOperator& op, std::optional<SplitOperator> split, const State& u0) {
  Problem p = linear_forced_problem(op, {}, u0);
  p.label = "heat";
  p.split = std::move(split);
  return p;
}

}  // namespace

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "hat") return InitialKind::hat;
  if (name == "pyramid") return InitialKind::pyramid;
  if (name == "fourier_decay") return InitialKind::fourier_decay;
  if (name == "smooth_compatible") return InitialKind::smooth_compatible;
  throw ConfigError("unknown initial data kind '" + name + "'");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::hat: return "hat";
    case InitialKind::pyramid: return "pyramid";
    case InitialKind::fourier_decay: return "fourier_decay";
    case InitialKind::smooth_compatible: return "smooth_compatible";
  }
  return "unknown";
}

State make_initial_data(const InitialDataSpec& spec, const Grid& grid) {
  const int m = grid.points_per_dim();
  State u(grid.size());
  auto fill = [&](auto&& value) {
    if (grid.dims() == 1) {
      for (int i = 0; i < m; ++i) u[i] = value(grid.coordinate(i), 0.5, i, 0);
    } else {
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          u[i + m * j] = value(grid.coordinate(i), grid.coordinate(j), i, j);
        }
      }
    }
  };

  switch (spec.kind) {
    case InitialKind::hat:
      if (grid.dims() == 1) {
        fill([](double x, double, int, int) { return tent(x); });
      } else {
        fill([](double x, double y, int, int) { return tent(x) * tent(y); });
      }
      break;
    case InitialKind::pyramid:
      fill([](double x, double y, int, int) {
        return 1.0 - 2.0 * std::max(std::abs(x - 0.5), std::abs(y - 0.5));
      });
      break;
    case InitialKind::fourier_decay: {
      if (!(spec.gamma >= 0.0) || !(spec.gamma <= 1.0)) {
        throw ConfigError("fourier_decay regularity gamma must lie in [0, 1]");
      }
      std::mt19937_64 rng(spec.seed);
      const Eigen::VectorXd gx = fourier_profile(grid, spec.gamma, rng);
      if (grid.dims() == 1) {
        u = gx;
      } else {
        const Eigen::VectorXd gy = fourier_profile(grid, spec.gamma, rng);
        fill([&](double, double, int i, int j) { return gx[i] * gy[j]; });
      }
      break;
    }
    case InitialKind::smooth_compatible:
      if (grid.dims() == 1) {
        fill([](double x, double, int, int) { return 0.9 * std::sin(std::numbers::pi * x); });
      } else {
        fill([](double x, double y, int, int) {
          return 0.9 * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
        });
      }
      break;
  }
  return u;
}

Problem linear_forced_problem(const SpectralOperator& op, const std::vector<State>& forcing,
                              const State& u0) {
  if (forcing.size() > 2) throw UnsupportedError("forcing must be at most affine in t");
  if (static_cast<std::size_t>(u0.size()) != op.size()) throw ShapeError("u0 does not match the grid");
  for (const auto& g : forcing) {
    if (static_cast<std::size_t>(g.size()) != op.size()) {
      throw ShapeError("forcing coefficient does not match the grid");
    }
  }
  const State g0 = forcing.size() > 0 ? forcing[0] : State::Zero(u0.size());
  const State g1 = forcing.size() > 1 ? forcing[1] : State::Zero(u0.size());

  Problem p{"linear_forced", op, std::nullopt, nullptr, u0, std::nullopt};
  p.f = [g0, g1](double t, const State&) -> State { return g0 + t * g1; };
  p.exact = [op, u0, g0, g1](double t) -> State {
    if (t == 0.0) return u0;
    return phi_apply_spectral(0, t, op, u0) + t * phi_apply_spectral(1, t, op, g0) +
           t * t * phi_apply_spectral(2, t, op, g1);
  };
  return p;
}

Problem heat_problem(const SpectralOperator& op, const State& u0) {
  return heat_from(op, std::nullopt, u0);
}

Problem heat_problem(const SplitOperator& op, const State& u0) {
  return heat_from(op.full, op, u0);
}

State allen_cahn_nonlinearity(const State& u) {
  return (u.array() - u.array().cube()).matrix();
}

State burgers_nonlinearity(const Grid& grid, const State& u) {
  const State dx = gradient_2d(grid, u, Direction::x);
  const State dy = gradient_2d(grid, u, Direction::y);
  return (-u.array() * (dx.array() + dy.array())).matrix();
}

Problem allen_cahn(const SpectralOperator& op, const InitialDataSpec& u0) {
  Problem p{"allen_cahn", op, std::nullopt, nullptr, make_initial_data(u0, op.grid()),
            std::nullopt};
  p.f = [](double, const State& u) { return allen_cahn_nonlinearity(u); };
  return p;
}

Problem allen_cahn(const SplitOperator& op, const InitialDataSpec& u0) {
  Problem p = allen_cahn(op.full, u0);
  p.split = op;
  return p;
}

Problem burgers(const SplitOperator& op, const InitialDataSpec& u0) {
  const Grid grid = op.full.grid();
  Problem p{"burgers", op.full, op, nullptr, make_initial_data(u0, grid), std::nullopt};
  p.f = [grid](double, const State& u) { return burgers_nonlinearity(grid, u); };
  return p;
}

}  // namespace expint
