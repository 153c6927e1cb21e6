#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace memdeblur {

// Objective for minimization. Fills grad and returns the value, or nullopt
// when the point is infeasible (outside an open domain) so the line search
// can backtrack.
using Objective =
    std::function<std::optional<double>(std::span<const double> x, std::span<double> grad)>;

struct LbfgsConfig {
  int memory = 10;
  int max_iters = 2000;
  double grad_tol = 1e-8;      // on the gradient inf-norm, absolute
  double armijo_c1 = 1e-4;
  int max_line_search = 60;    // halvings from the unit step
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  // line search could not make progress
};

// Limited-memory BFGS with two-loop recursion, Armijo backtracking from unit
// step, and H0 scaled by s'y/y'y. Deterministic. x0 must be feasible.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsConfig& config);

}  // namespace memdeblur
