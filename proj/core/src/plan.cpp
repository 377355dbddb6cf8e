#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kksketch/bounds.hpp"
#include "kksketch/experiments.hpp"

namespace kksketch {

std::size_t sketch_rows(double delta, std::size_t n) {
  const double target = (1.0 + delta) * static_cast<double>(n);
  // (1 + 0.1) * 10 = 11.000000000000002 must still give 11.
  const double rounded = std::round(target);
  if (std::abs(target - rounded) <= 1e-9 * std::max(1.0, target)) {
    return static_cast<std::size_t>(rounded);
  }
  return static_cast<std::size_t>(std::ceil(target));
}

ParameterPlan parameter_plan(double delta, std::size_t n, const PlanConstants& constants) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive and finite");
  if (n == 0) throw std::invalid_argument("n must be positive");
  const PsiOneParams psi{constants.b_psi1, constants.c_bernstein};
  psi.validate();
  for (double c : {constants.c2, constants.c3, constants.c_b}) {
    if (!(c > 0.0)) throw std::invalid_argument("plan constants must be positive");
  }
  if (constants.c_prime < 0.0) throw std::invalid_argument("c_prime must be nonnegative");

  ParameterPlan plan;
  plan.delta = delta;
  plan.n = n;
  plan.N = sketch_rows(delta, n);
  plan.constants = constants;

  plan.beta = delta / (2.0 * (1.0 + delta));
  plan.t_latala = std::pow(constants.c2 * delta, 2.0 / delta);
  const auto c4 = c4_constant();
  plan.c4 = c4.c4;
  plan.gamma = c4.gamma;
  plan.c1 = (2.0 / 3.0) * constants.c_b;

  const double b = constants.b_psi1;
  const double c = constants.c_bernstein;
  const double spread = std::max(b / std::sqrt(c), b / c);
  plan.C_upper = 12.0 * spread + 2.0;
  plan.t_upper_net = 6.0 * spread + 1.0;

  plan.theta = plan.beta * plan.t_latala * plan.gamma / (2.0 * plan.C_upper);
  plan.c_delta = std::pow(constants.c3 * delta, 1.0 + 2.0 / delta);
  plan.c_chain = plan.beta * plan.t_latala * plan.gamma - plan.theta * plan.C_upper;

  const double nd = static_cast<double>(n);
  plan.log_failure_bound = static_cast<double>(plan.N) * std::numbers::ln2 +
                           (1.0 + delta / 2.0) * nd * std::log(plan.c1 * plan.t_latala) +
                           nd * std::log(3.0 / plan.theta);
  plan.log_failure_target = std::log(0.5) - constants.c_prime * nd;
  plan.failure_bound_satisfied = plan.log_failure_bound <= plan.log_failure_target;

  if (delta >= 1.0) {
    plan.warnings.emplace_back("delta >= 1: outside the small-delta regime the constants are tuned for");
  }
  if (plan.c1 * plan.t_latala >= 1.0) {
    plan.warnings.emplace_back("c1 * t >= 1: the small-ball bound 1 - c1 t is vacuous");
  } else if (plan.beta >= 1.0 - plan.c1 * plan.t_latala) {
    plan.warnings.emplace_back("beta >= 1 - c1 t: Chernoff lower-tail regime (beta < p) not guaranteed");
  }
  if (!plan.failure_bound_satisfied) {
    plan.warnings.emplace_back("failure bound exceeds (1/2) e^{-c' n} under the configured constants");
  }
  return plan;
}

nlohmann::json to_json(const ParameterPlan& plan) {
  return {{"delta", plan.delta},
          {"n", plan.n},
          {"N", plan.N},
          {"beta", plan.beta},
          {"t_latala", plan.t_latala},
          {"gamma", plan.gamma},
          {"c4", plan.c4},
          {"c1", plan.c1},
          {"C_upper", plan.C_upper},
          {"t_upper_net", plan.t_upper_net},
          {"theta", plan.theta},
          {"c_delta", plan.c_delta},
          {"c_chain", plan.c_chain},
          {"constants",
           {{"c_bernstein", plan.constants.c_bernstein},
            {"b_psi1", plan.constants.b_psi1},
            {"c2", plan.constants.c2},
            {"c3", plan.constants.c3},
            {"c_prime", plan.constants.c_prime},
            {"c_b", plan.constants.c_b}}},
          {"log_failure_bound", plan.log_failure_bound},
          {"log_failure_target", plan.log_failure_target},
          {"failure_bound_satisfied", plan.failure_bound_satisfied},
          {"warnings", plan.warnings}};
}

}  // namespace kksketch
