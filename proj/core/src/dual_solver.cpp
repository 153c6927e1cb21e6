#include "memdeblur/dual_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "memdeblur/lbfgs.hpp"

namespace memdeblur {
namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Negated dual objective and gradient; nullopt at infeasible points.
std::optional<double> negated_dual(const DualProblem& p, std::span<const double> lambda,
                                   std::span<double> grad) {
  const auto t = p.op.apply_transpose(lambda);
  if (!p.prior.admissible(t)) return std::nullopt;
  const double log_mgf = p.prior.log_mgf(t);
  const auto tilted_mean = p.prior.grad_log_mgf(t);
  const auto pushforward = p.op.apply(tilted_mean);

  double value = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    value += p.b[i] * lambda[i] - lambda[i] * lambda[i] / (2.0 * p.alpha);
    grad[i] = -(p.b[i] - lambda[i] / p.alpha - pushforward[i]);
  }
  return -(value - log_mgf);
}

// Conjugate gradient for the SPD system H z = rhs with
// H = I/alpha + A diag(hess) A^T (the negated dual Hessian).
std::vector<double> newton_cg_solve(const DualProblem& p, std::span<const double> hess_diag,
                                    std::span<const double> rhs) {
  const std::size_t n = rhs.size();
  auto hess_apply = [&](std::span<const double> w, std::span<double> out) {
    auto tw = p.op.apply_transpose(w);
    for (std::size_t i = 0; i < tw.size(); ++i) tw[i] *= hess_diag[i];
    p.op.apply(tw, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += w[i] / p.alpha;
  };

  std::vector<double> z(n, 0.0), r(rhs.begin(), rhs.end()), d(r), hd(n);
  double rr = dot(r, r);
  const double target = rr * 1e-24;  // relative residual ~1e-12
  const int max_cg = std::max<int>(200, static_cast<int>(4 * n));
  for (int k = 0; k < max_cg && rr > target; ++k) {
    hess_apply(d, hd);
    const double dhd = dot(d, hd);
    if (dhd <= 0.0) break;
    const double step = rr / dhd;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] += step * d[i];
      r[i] -= step * hd[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
  }
  return z;
}

}  // namespace

double dual_value_and_gradient(const DualProblem& problem, std::span<const double> lambda,
                               std::span<double> grad) {
  if (lambda.size() != problem.b.size() || grad.size() != lambda.size()) {
    throw std::invalid_argument("dual_value_and_gradient: length mismatch");
  }
  auto value = negated_dual(problem, lambda, grad);
  if (!value) throw std::domain_error("dual_value_and_gradient: inadmissible point");
  for (double& g : grad) g = -g;
  return -*value;
}

DualState solve_dual(const DualProblem& problem, const SolverConfig& config) {
  const std::size_t n = problem.b.size();
  if (problem.op.rows() != static_cast<int>(n)) {
    throw std::invalid_argument("solve_dual: observation length != operator rows");
  }
  if (problem.prior.dimension() != problem.op.cols()) {
    throw std::invalid_argument("solve_dual: prior dimension != operator cols");
  }
  if (problem.alpha <= 0.0) throw std::invalid_argument("solve_dual: alpha must be > 0");

  const double tol = config.grad_tol * (1.0 + inf_norm(problem.b));

  LbfgsConfig lc;
  lc.memory = config.memory;
  lc.max_iters = config.max_iters;
  lc.grad_tol = tol;
  std::vector<double> x0 =
      config.start ? *config.start : std::vector<double>(n, 0.0);
  if (x0.size() != n) throw std::invalid_argument("solve_dual: start length mismatch");

  auto objective = [&problem](std::span<const double> x, std::span<double> g) {
    return negated_dual(problem, x, g);
  };
  LbfgsResult lb = lbfgs_minimize(objective, std::move(x0), lc);

  DualState state;
  state.lambda = std::move(lb.x);
  state.value = -lb.value;
  state.grad_inf_norm = lb.grad_inf_norm;
  state.iterations = lb.iterations;

  // Newton-CG polish: the strongly concave dual has an explicit Hessian
  //   -I/alpha - A diag(K''(A^T lambda)) A^T,
  // so a few exact Newton steps push the gradient to levels the Armijo
  // search cannot certify once decreases fall below evaluation noise.
  std::vector<double> grad(n), trial(n), trial_grad(n);
  auto value = negated_dual(problem, state.lambda, grad);
  double grad_norm = inf_norm(grad);
  for (int it = 0; it < config.polish_iters && grad_norm > tol; ++it) {
    auto t = problem.op.apply_transpose(state.lambda);
    std::vector<double> hess(t.size());
    problem.prior.hess_log_mgf(t, hess);
    auto delta = newton_cg_solve(problem, hess, grad);

    bool accepted = false;
    double step = 1.0;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = state.lambda[i] - step * delta[i];
      auto tv = negated_dual(problem, trial, trial_grad);
      if (!tv) continue;
      const double trial_norm = inf_norm(trial_grad);
      // Accept on objective decrease or on gradient-norm decrease; near the
      // optimum the former drowns in rounding noise.
      if (*tv <= *value || trial_norm < grad_norm) {
        state.lambda = trial;
        value = tv;
        grad = trial_grad;
        grad_norm = trial_norm;
        accepted = true;
        break;
      }
    }
    state.iterations += 1;
    if (!accepted) break;
  }
  state.value = -*value;
  state.grad_inf_norm = grad_norm;
  state.converged = grad_norm <= tol;
  return state;
}

std::vector<double> recover_expectation(const DualProblem& problem, const DualState& state) {
  return problem.prior.grad_log_mgf(problem.op.apply_transpose(state.lambda));
}

Image deconvolve(const Image& blurred, const Kernel& kernel, const PriorSpec& prior_spec,
                 double alpha, const SolverConfig& config) {
  const ConvOperator op(kernel, blurred.height, blurred.width);
  const Prior prior = make_prior(prior_spec, op.cols());
  Image out(blurred.height, blurred.width, blurred.channels);
  for (int c = 0; c < blurred.channels; ++c) {
    DualProblem problem{op, vectorize(blurred, c), prior, alpha};
    DualState state = solve_dual(problem, config);
    set_channel(out, c, recover_expectation(problem, state));
  }
  return out;
}

}  // namespace memdeblur
