#include "expint/integrators.hpp"

#include <cmath>
#include <string>

#include "expint/errors.hpp"

namespace expint {
namespace {

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("step size must be positive");
}

template <typename Tableau>
void check_explicit(const Tableau& t) {
  const auto s = t.c.size();
  if (s == 0 || t.b.size() != s || t.a.size() != s) {
    throw ConfigError("tableau '" + t.label + "' has inconsistent stage counts");
  }
  if (t.c[0] != 0.0) throw ConfigError("tableau '" + t.label + "' must have c1 = 0");
  for (std::size_t i = 0; i < s; ++i) {
    if (t.a[i].size() != i) {
      throw ConfigError("tableau '" + t.label + "' is not strictly lower triangular");
    }
  }
}

}  // namespace

Stepper::Stepper(const SpectralOperator& op, double tau, std::string label)
    : op_(op), tau_(tau), label_(std::move(label)) {
  check_tau(tau);
}

Stepper::Stepper(const ExpRkTableau& tableau, const SpectralOperator& op, double tau)
    : Stepper(op, tau, tableau.label) {
  check_explicit(tableau);
  c_ = tableau.c;
  const Eigen::VectorXd z = tau * op.eigenvalues();
  const auto n = z.size();
  const int s = tableau.stages();

  semigroup_ = z.array().exp();
  stage_semigroup_.resize(s);
  a_.resize(s);
  b_.assign(s, Eigen::VectorXd(n));
  for (int i = 0; i < s; ++i) {
    stage_semigroup_[i] = (c_[i] * z).array().exp();
    a_[i].assign(i, Eigen::VectorXd(n));
  }
  for (Eigen::Index p = 0; p < n; ++p) {
    for (int i = 0; i < s; ++i) {
      b_[i][p] = tau * tableau.b[i](z[p]);
      for (int j = 0; j < i; ++j) a_[i][j][p] = tau * tableau.a[i][j](z[p]);
    }
  }
}

Stepper::Stepper(const SplitTableau& tableau, const SplitOperator& op, double tau)
    : Stepper(op.full, tau, tableau.label) {
  check_explicit(tableau);
  c_ = tableau.c;
  const Eigen::VectorXd z1 = tau * op.a1.eigenvalues();
  const Eigen::VectorXd z2 = tau * op.a2.eigenvalues();
  const auto n = z1.size();
  const int s = tableau.stages();

  semigroup_ = z1.array().exp() * z2.array().exp();
  stage_semigroup_.resize(s);
  a_.resize(s);
  b_.assign(s, Eigen::VectorXd(n));
  for (int i = 0; i < s; ++i) {
    stage_semigroup_[i] = (c_[i] * z1).array().exp() * (c_[i] * z2).array().exp();
    a_[i].assign(i, Eigen::VectorXd(n));
  }
  for (Eigen::Index p = 0; p < n; ++p) {
    for (int i = 0; i < s; ++i) {
      b_[i][p] = tau * eval_split_weight(tableau.b[i], z1[p], z2[p]);
      for (int j = 0; j < i; ++j) a_[i][j][p] = tau * eval_split_weight(tableau.a[i][j], z1[p], z2[p]);
    }
  }
}

State Stepper::step(const Nonlinearity& f, double t_n, const State& u_n, StepRecord* record) const {
  if (static_cast<std::size_t>(u_n.size()) != op_.size()) {
    throw ShapeError("state does not match the stepper's grid");
  }
  const int s = stages();
  const Eigen::VectorXd u_hat = op_.forward(u_n);
  std::vector<Eigen::VectorXd> f_hat(s);
  if (record != nullptr) {
    record->t_n = t_n;
    record->tau = tau_;
    record->u_n = u_n;
    record->stages.clear();
    record->stage_f.clear();
  }

  for (int i = 0; i < s; ++i) {
    State stage;
    if (i == 0) {
      stage = u_n;
    } else {
      Eigen::VectorXd hat = stage_semigroup_[i].cwiseProduct(u_hat);
      for (int j = 0; j < i; ++j) hat += a_[i][j].cwiseProduct(f_hat[j]);
      stage = op_.backward(hat);
    }
    State fi = f(t_n + c_[i] * tau_, stage);
    if (fi.size() != u_n.size()) throw ShapeError("nonlinearity changed the state shape");
    f_hat[i] = op_.forward(fi);
    if (record != nullptr) {
      record->stages.push_back(std::move(stage));
      record->stage_f.push_back(std::move(fi));
    }
  }

  Eigen::VectorXd hat = semigroup_.cwiseProduct(u_hat);
  for (int i = 0; i < s; ++i) hat += b_[i].cwiseProduct(f_hat[i]);
  State next = op_.backward(hat);
  if (!next.allFinite()) throw DivergenceError(t_n, -1);
  return next;
}

std::pair<State, StepRecord> step_eerk(const ExpRkTableau& tableau, const SpectralOperator& op,
                                       const Nonlinearity& f, double t_n, double tau,
                                       const State& u_n) {
  StepRecord record;
  State next = Stepper(tableau, op, tau).step(f, t_n, u_n, &record);
  return {std::move(next), std::move(record)};
}

State step_split_euler(const SplitOperator& op, const Nonlinearity& f, double t_n, double tau,
                       const State& u_n) {
  return Stepper(tableau_split_euler(), op, tau).step(f, t_n, u_n);
}

std::pair<State, StepRecord> step_erk2l(const SplitTableau& tableau, const SplitOperator& op,
                                        const Nonlinearity& f, double t_n, double tau,
                                        const State& u_n) {
  StepRecord record;
  State next = Stepper(tableau, op, tau).step(f, t_n, u_n, &record);
  return {std::move(next), std::move(record)};
}

SchemeKind parse_scheme(const std::string& name) {
  if (name == "expeuler") return SchemeKind::expeuler;
  if (name == "erk2") return SchemeKind::erk2;
  if (name == "split_euler") return SchemeKind::split_euler;
  if (name == "erk2l") return SchemeKind::erk2l;
  throw ConfigError("unknown scheme '" + name + "'");
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::expeuler: return "expeuler";
    case SchemeKind::erk2: return "erk2";
    case SchemeKind::split_euler: return "split_euler";
    case SchemeKind::erk2l: return "erk2l";
  }
  return "unknown";
}

bool is_split(SchemeKind kind) {
  return kind == SchemeKind::split_euler || kind == SchemeKind::erk2l;
}

Stepper make_stepper(const SchemeSpec& scheme, const Problem& problem, double tau) {
  if (is_split(scheme.kind) && !problem.split) {
    throw ConfigError("scheme '" + to_string(scheme.kind) +
                      "' needs a 2D problem with a split operator");
  }
  switch (scheme.kind) {
    case SchemeKind::expeuler: return Stepper(tableau_exponential_euler(), problem.op, tau);
    case SchemeKind::erk2: return Stepper(tableau_erk2(scheme.c2), problem.op, tau);
    case SchemeKind::split_euler: return Stepper(tableau_split_euler(), *problem.split, tau);
    case SchemeKind::erk2l: return Stepper(tableau_erk2l(scheme.c2), *problem.split, tau);
  }
  throw ConfigError("unknown scheme");
}

long step_count(double T, double tau) {
  check_tau(tau);
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("final time must be positive");
  const double ratio = T / tau;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(static_cast<double>(n) - ratio) > 1e-9 * ratio) {
    throw ConfigError("T = " + std::to_string(T) + " is not an integer multiple of tau = " +
                      std::to_string(tau));
  }
  return n;
}

IntegrationResult integrate(const Stepper& stepper, const Problem& problem, double T,
                            const Observer& observer) {
  const long n = step_count(T, stepper.tau());
  IntegrationResult result{problem.u0, 0};
  StepRecord record;
  for (long step = 0; step < n; ++step) {
    const double t_n = static_cast<double>(step) * stepper.tau();
    try {
      result.state = stepper.step(problem.f, t_n, result.state, observer ? &record : nullptr);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.time(), step);
    }
    result.steps = step + 1;
    if (observer) observer(step, record);
  }
  return result;
}

}  // namespace expint
