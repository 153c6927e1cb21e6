#pragma once

#include <optional>
#include <span>
#include <vector>

#include "memdeblur/conv_operator.hpp"
#include "memdeblur/image.hpp"
#include "memdeblur/prior.hpp"

namespace memdeblur {

// The finite-dimensional dual of the entropic deconvolution problem:
//
//   maximize  D(lambda) = <b, lambda> - |lambda|^2/(2 alpha) - log M(A^T lambda)
//
// over lambda in R^rows(A), where M is the prior's moment-generating
// function. D is strongly concave with modulus 1/alpha, so the maximizer is
// unique; the primal estimate is grad log M at A^T of the maximizer.
struct DualProblem {
  const LinearOperator& op;
  std::vector<double> b;
  const Prior& prior;
  double alpha;
};

struct SolverConfig {
  int memory = 10;            // L-BFGS history
  double grad_tol = 1e-8;     // scaled by (1 + |b|_inf)
  int max_iters = 2000;
  int polish_iters = 8;       // Newton-CG refinement steps after L-BFGS (0 = off)
  std::optional<std::vector<double>> start;  // default: zero vector
};

struct DualState {
  std::vector<double> lambda;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Value and gradient of D at lambda:
//   grad D = b - lambda/alpha - A grad_log_mgf(A^T lambda).
// Throws std::domain_error when A^T lambda is outside the prior's log-MGF
// domain (exponential priors); the solver treats such points as infeasible.
double dual_value_and_gradient(const DualProblem& problem, std::span<const double> lambda,
                               std::span<double> grad);

// L-BFGS ascent (two-loop recursion on the negated objective) with Armijo
// backtracking, followed by a short Newton-CG polish using the exact dual
// Hessian. Deterministic; returns the best iterate even if not converged.
DualState solve_dual(const DualProblem& problem, const SolverConfig& config = {});

// Primal-dual recovery: grad_log_mgf(prior, A^T lambda). For uniform priors
// every component is strictly inside its interval.
std::vector<double> recover_expectation(const DualProblem& problem, const DualState& state);

// Per-channel entropic deconvolution of a blurred image. Output is left
// unclamped; clamping happens at write time only.
Image deconvolve(const Image& blurred, const Kernel& kernel, const PriorSpec& prior_spec,
                 double alpha, const SolverConfig& config = {});

}  // namespace memdeblur
