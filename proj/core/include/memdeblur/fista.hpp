#pragma once

#include <span>
#include <vector>

#include "memdeblur/conv_operator.hpp"
#include "memdeblur/image.hpp"
#include "memdeblur/prior.hpp"

namespace memdeblur {

// Proximal step of the entropic regularizer v (the value function of the
// KL-constrained moment problem):
//
//   prox_{tv}(u) = argmin_x { v(x) + |x - u|^2 / (2t) },
//
// computed through its own scalar dual per coordinate,
//   max_l { u l - t l^2/2 - log M(l) },
// and recovered as grad log M at the maximizer.
struct ProxProblem {
  std::vector<double> u;
  double t = 1.0;
  const Prior& prior;
};

// Exponential priors use the closed componentwise form (smaller quadratic
// root, which keeps the argument inside the log-MGF domain); other families
// fall back to a safeguarded Newton solve per coordinate (tol 1e-10).
std::vector<double> prox_v(const ProxProblem& problem);

// The image-level regularizer v(x) = sup_t { <t,x> - log M(t) }. Closed form
// for exponential (sum of x b - 1 - log(x b)) and poisson coordinates;
// numeric conjugate for uniform. Infinite outside the admissible range;
// throws std::domain_error for nonpositive exponential components.
double regularizer_value(std::span<const double> x, const Prior& prior);

struct FistaConfig {
  int iters = 500;
  bool backtrack = false;      // grow L until the descent lemma holds
  double lipschitz_scale = 1.0;  // multiplies the analytic alpha*sigma_max^2
};

// FISTA on  v(x) + alpha/2 |Cx - b|^2  with momentum restarts disabled and
// step 1/L, L = alpha * sigma_max(C)^2 (optionally backtracked upward).
std::vector<double> fista_minimize(const LinearOperator& op, std::span<const double> b,
                                   const Prior& prior, double alpha, double lipschitz,
                                   const FistaConfig& config = {});

// Per-channel deblurring through the image-level reformulation.
Image fista_deblur(const Image& blurred, const Kernel& kernel, const PriorSpec& prior_spec,
                   double alpha, const FistaConfig& config = {});

}  // namespace memdeblur
