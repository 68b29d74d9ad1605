#include "expint/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "expint/errors.hpp"
#include "expint/phi.hpp"

namespace expint {
namespace {

// Nodal values including the zero boundary: (N+1) or (N+1)^2 entries, x fastest.
std::vector<double> extend_with_boundary(const State& v, const Grid& grid) {
  const int n = grid.subintervals();
  const int m = grid.points_per_dim();
  if (grid.dims() == 1) {
    std::vector<double> out(n + 1, 0.0);
    for (int i = 0; i < m; ++i) out[i + 1] = v[i];
    return out;
  }
  std::vector<double> out(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) out[(i + 1) + (n + 1) * (j + 1)] = v[i + m * j];
  }
  return out;
}

struct HolderScan {
  const std::vector<double>& values;
  const Grid& grid;
  double exponent;
  double best = 0.0;

  void pair(std::size_t p, std::size_t q) {
    if (p == q) return;
    const int n1 = grid.subintervals() + 1;
    double dist2 = 0.0;
    if (grid.dims() == 1) {
      const double dx = (static_cast<double>(p) - static_cast<double>(q)) * grid.h();
      dist2 = dx * dx;
    } else {
      const double dx = (static_cast<double>(p % n1) - static_cast<double>(q % n1)) * grid.h();
      const double dy = (static_cast<double>(p / n1) - static_cast<double>(q / n1)) * grid.h();
      dist2 = dx * dx + dy * dy;
    }
    const double quotient = std::abs(values[p] - values[q]) / std::pow(dist2, 0.5 * exponent);
    best = std::max(best, quotient);
  }
};

double holder_sampled(const State& v, const NormKind& kind, const Grid& grid) {
  const std::vector<double> values = extend_with_boundary(v, grid);
  HolderScan scan{values, grid, kind.exponent};
  const int n1 = grid.subintervals() + 1;
  if (grid.dims() == 1) {
    for (int i = 0; i + 1 < n1; ++i) scan.pair(i, i + 1);
  } else {
    for (int j = 0; j < n1; ++j) {
      for (int i = 0; i < n1; ++i) {
        const std::size_t p = i + static_cast<std::size_t>(n1) * j;
        if (i + 1 < n1) scan.pair(p, p + 1);
        if (j + 1 < n1) scan.pair(p, p + n1);
      }
    }
  }
  std::mt19937_64 rng(kind.seed);
  const auto count = static_cast<std::uint64_t>(values.size());
  for (int s = 0; s < kind.samples; ++s) {
    const auto p = static_cast<std::size_t>(rng() % count);
    const auto q = static_cast<std::size_t>(rng() % count);
    scan.pair(p, q);
  }
  return scan.best;
}

double max_abs(const State& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

NormKind NormKind::holder(double exponent, int samples, std::uint64_t seed) {
  if (!(exponent > 0.0) || !(exponent < 2.0)) {
    throw ConfigError("Hölder exponent must lie in (0, 2)");
  }
  if (samples < 100) throw ConfigError("Hölder norm needs at least 100 sample pairs");
  return {NormType::holder, exponent, samples, seed};
}

std::string NormKind::name() const {
  switch (type) {
    case NormType::max: return "max";
    case NormType::c1_discrete: return "c1";
    case NormType::holder: return fmt::format("holder({})", exponent);
  }
  return "unknown";
}

double norm(const State& v, const NormKind& kind, const Grid& grid) {
  if (static_cast<std::size_t>(v.size()) != grid.size()) throw ShapeError("state does not match grid");
  switch (kind.type) {
    case NormType::max:
      return max_abs(v);
    case NormType::c1_discrete:
      if (grid.dims() == 1) return max_abs(v) + max_abs(gradient_1d(grid, v));
      return max_abs(v) + std::max(max_abs(gradient_2d(grid, v, Direction::x)),
                                   max_abs(gradient_2d(grid, v, Direction::y)));
    case NormType::holder:
      return holder_sampled(v, kind, grid);
  }
  return 0.0;
}

double holder_quotient_exhaustive(const State& v, double exponent, const Grid& grid) {
  if (grid.subintervals() > 16) {
    throw ConfigError("exhaustive Hölder enumeration is limited to N <= 16");
  }
  if (static_cast<std::size_t>(v.size()) != grid.size()) throw ShapeError("state does not match grid");
  const std::vector<double> values = extend_with_boundary(v, grid);
  HolderScan scan{values, grid, exponent};
  for (std::size_t p = 0; p < values.size(); ++p) {
    for (std::size_t q = p + 1; q < values.size(); ++q) scan.pair(p, q);
  }
  return scan.best;
}

FitResult fit_order(std::span<const double> taus, std::span<const double> errors) {
  if (taus.size() != errors.size()) throw ShapeError("fit_order needs matching tau and error lists");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double e = errors[i];
    if (!std::isfinite(e) || !(e > 0.0) || !(taus[i] > 0.0)) continue;
    if (e <= kNoiseFloor) {
      throw NoiseFloorError(fmt::format("error {} at tau {} is below the noise floor", e, taus[i]));
    }
    xs.push_back(std::log(taus[i]));
    ys.push_back(std::log(e));
  }
  if (xs.size() < 3) {
    throw InsufficientDataError(fmt::format("{} usable points, need at least 3", xs.size()));
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("step sizes must not all coincide");
  FitResult fit;
  fit.order = sxy / sxx;
  const double intercept = my - fit.order * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + fit.order * xs[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.residual = std::sqrt(ss_res / n);
  fit.points = static_cast<int>(xs.size());
  return fit;
}

SchemeKind reference_family(SchemeKind scheme) {
  return is_split(scheme) ? SchemeKind::erk2l : SchemeKind::erk2;
}

bool ConvergenceReport::any_diverged() const {
  return std::any_of(divergence_step.begin(), divergence_step.end(),
                     [](long s) { return s >= 0; });
}

const NormSeries* ConvergenceReport::series(NormType type) const {
  for (const auto& s : norms) {
    if (s.kind.type == type) return &s;
  }
  return nullptr;
}

std::vector<double> dyadic_steps(double T, int first, int last) {
  std::vector<double> taus;
  for (int k = first; k <= last; ++k) taus.push_back(std::ldexp(T, -k));
  return taus;
}

std::string describe_reference(const SchemeSpec& scheme, const ReferenceSpec& reference,
                               double tau_min) {
  if (reference.kind == ReferenceSpec::Kind::exact) return "exact";
  const SchemeKind ref = reference.scheme.value_or(reference_family(scheme.kind));
  return fmt::format("{} c2={} tau_ref={} refinement={}", to_string(ref), scheme.c2,
                     tau_min / reference.refinement, reference.refinement);
}

State compute_reference(const Problem& problem, const SchemeSpec& scheme,
                        const ReferenceSpec& reference, double tau_min, double T) {
  if (reference.kind == ReferenceSpec::Kind::exact) {
    if (!problem.exact) throw ConfigError("problem '" + problem.label + "' has no exact solution");
    return (*problem.exact)(T);
  }
  if (reference.refinement < 16) throw ConfigError("fine-step reference needs refinement >= 16");
  const SchemeSpec ref{reference.scheme.value_or(reference_family(scheme.kind)), scheme.c2};
  const Stepper stepper = make_stepper(ref, problem, tau_min / reference.refinement);
  return integrate(stepper, problem, T).state;
}

ConvergenceReport run_convergence_study(const Problem& problem, const SchemeSpec& scheme,
                                        std::span<const double> taus, double T,
                                        std::span<const NormKind> norms,
                                        const ReferenceSpec& reference,
                                        const StudyOptions& options) {
  if (taus.empty()) throw ConfigError("convergence study needs at least one step size");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    step_count(T, taus[i]);
    if (i > 0 && !(taus[i] < taus[i - 1])) {
      throw ConfigError("step sizes must be strictly decreasing");
    }
  }
  if (norms.empty()) throw ConfigError("convergence study needs at least one norm");

  ConvergenceReport report;
  report.problem = problem.label;
  report.scheme = to_string(scheme.kind);
  report.T = T;
  report.taus.assign(taus.begin(), taus.end());
  const double tau_min = taus.back();
  report.reference = describe_reference(scheme, reference, tau_min);
  report.reference_tau =
      reference.kind == ReferenceSpec::Kind::exact ? 0.0 : tau_min / reference.refinement;

  const State ref = options.reference_state
                        ? *options.reference_state
                        : compute_reference(problem, scheme, reference, tau_min, T);

  const std::size_t count = taus.size();
  std::vector<State> finals(count);
  report.runtime_ms.assign(count, 0.0);
  report.divergence_step.assign(count, -1);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        const Stepper stepper = make_stepper(scheme, problem, taus[i]);
        finals[i] = integrate(stepper, problem, T).state;
      } catch (const DivergenceError& e) {
        report.divergence_step[i] = std::max(0L, e.step());
      }
      const auto stop = std::chrono::steady_clock::now();
      report.runtime_ms[i] = std::chrono::duration<double, std::milli>(stop - start).count();
    }
  };
  const int threads = std::clamp(options.threads, 1, static_cast<int>(count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  const Grid& grid = problem.grid();
  for (const auto& kind : norms) {
    NormSeries s{kind, {}, std::nullopt, {}};
    for (std::size_t i = 0; i < count; ++i) {
      s.errors.push_back(report.divergence_step[i] >= 0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : norm(finals[i] - ref, kind, grid));
    }
    try {
      s.fit = fit_order(report.taus, s.errors);
    } catch (const NoiseFloorError&) {
      s.flag = "noise_floor";
    } catch (const InsufficientDataError&) {
      s.flag = "insufficient_data";
    }
    report.norms.push_back(std::move(s));
  }
  return report;
}

double split_defect_norm(const SplitOperator& op, int k, double t, const State& v) {
  if (!(t > 0.0)) throw ConfigError("defect times must be positive");
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  const Eigen::VectorXd& lam = op.a1.eigenvalues();
  const Eigen::VectorXd& mu = op.a2.eigenvalues();
  Eigen::VectorXd mult(lam.size());
  for (Eigen::Index p = 0; p < lam.size(); ++p) {
    mult[p] = phi_scalar(k, t * (lam[p] + mu[p])) -
              factorial * phi_scalar(k, t * lam[p]) * phi_scalar(k, t * mu[p]);
  }
  const double vnorm = max_abs(v);
  if (!(vnorm > 0.0)) throw DomainError("defect study needs a nonzero vector");
  return max_abs(apply_spectral_multiplier(op.full, mult, v)) / vnorm;
}

DefectReport split_defect_study(const SplitOperator& op, int k, const State& v, double beta1,
                                std::span<const double> ts, const std::string& label) {
  if (k < 1 || k > kMaxPhiOrder) throw UnsupportedError("split defect needs 1 <= k <= K_MAX");
  DefectReport report;
  report.label = label;
  report.k = k;
  report.beta1 = beta1;
  report.ts.assign(ts.begin(), ts.end());
  for (double t : ts) {
    if (!(t > 0.0) || !(t <= 1.0)) throw ConfigError("defect times must lie in (0, 1]");
    report.defects.push_back(split_defect_norm(op, k, t, v));
  }
  try {
    report.fit = fit_order(report.ts, report.defects);
  } catch (const NoiseFloorError&) {
    report.flag = "noise_floor";
  } catch (const InsufficientDataError&) {
    report.flag = "insufficient_data";
  }
  return report;
}

}  // namespace expint
