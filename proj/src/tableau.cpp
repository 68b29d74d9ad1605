#include "expint/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "expint/errors.hpp"

namespace expint {
namespace {

void check_c2(double c2) {
  if (!(c2 > 0.0) || !(c2 <= 1.0)) {
    throw ConfigError("c2 must lie in (0, 1], got " + std::to_string(c2));
  }
}

}  // namespace

double eval_split_weight(const SplitWeight& weight, double z1, double z2) {
  double sum = 0.0;
  for (const auto& p : weight) sum += p.prefactor * p.first(z1) * p.second(z2);
  return sum;
}

ExpRkTableau tableau_exponential_euler() {
  ExpRkTableau t;
  t.label = "expeuler";
  t.c = {0.0};
  t.b = {PhiCombo::phi(1)};
  t.a = {{}};
  t.order = 1;
  return t;
}

ExpRkTableau tableau_erk2(double c2) {
  check_c2(c2);
  ExpRkTableau t;
  t.label = "erk2";
  t.c = {0.0, c2};
  t.b = {PhiCombo{{1, 1.0, 1.0}, {2, 1.0, -1.0 / c2}}, PhiCombo::phi(2, 1.0 / c2)};
  t.a = {{}, {PhiCombo::phi(1, c2, c2)}};
  t.order = 2;
  return t;
}

SplitTableau tableau_split_euler() {
  SplitTableau t;
  t.label = "split_euler";
  t.c = {0.0};
  t.b = {SplitWeight{{1.0, PhiCombo::phi(1), PhiCombo::phi(1)}}};
  t.a = {{}};
  t.order = 1;
  return t;
}

SplitTableau tableau_erk2l(double c2) {
  check_c2(c2);
  SplitTableau t;
  t.label = "erk2l";
  t.c = {0.0, c2};
  t.b = {
      SplitWeight{{1.0, PhiCombo::phi(1), PhiCombo::phi(1)},
                  {-2.0 / c2, PhiCombo::phi(2), PhiCombo::phi(2)}},
      SplitWeight{{2.0 / c2, PhiCombo::phi(2), PhiCombo::phi(2)}},
  };
  t.a = {{}, {SplitWeight{{c2, PhiCombo::phi(1, 1.0, c2), PhiCombo::phi(1, 1.0, c2)}}}};
  t.order = 2;
  return t;
}

double OrderConditionReport::max_residual() const {
  double r = std::max(first, second);
  for (double s : stages) r = std::max(r, s);
  return r;
}

OrderConditionReport check_order_conditions(const ExpRkTableau& tableau, int order,
                                            std::span<const double> z_samples) {
  if (order != 1 && order != 2) throw UnsupportedError("order conditions exist for orders 1 and 2");
  OrderConditionReport report;
  report.order = order;
  const int s = tableau.stages();
  if (order == 2) report.stages.assign(s > 1 ? s - 1 : 0, 0.0);

  for (double z : z_samples) {
    double sum_b = 0.0;
    double sum_bc = 0.0;
    for (int i = 0; i < s; ++i) {
      const double bi = tableau.b[i](z);
      sum_b += bi;
      sum_bc += bi * tableau.c[i];
    }
    report.first = std::max(report.first, std::abs(sum_b - phi_scalar(1, z)));
    if (order < 2) continue;
    report.second = std::max(report.second, std::abs(sum_bc - phi_scalar(2, z)));
    for (int i = 1; i < s; ++i) {
      double row = 0.0;
      for (const auto& aij : tableau.a[i]) row += aij(z);
      const double ci = tableau.c[i];
      const double res = std::abs(row - ci * phi_scalar(1, ci * z));
      report.stages[i - 1] = std::max(report.stages[i - 1], res);
    }
  }
  return report;
}

}  // namespace expint
