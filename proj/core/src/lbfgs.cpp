#include "memdeblur/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace memdeblur {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsConfig& config) {
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);

  std::vector<double> grad(n), new_x(n), new_grad(n), direction(n);
  auto value = objective(result.x, grad);
  if (!value) throw std::invalid_argument("lbfgs_minimize: infeasible start");
  result.value = *value;
  result.grad_inf_norm = inf_norm(grad);

  std::deque<Pair> history;
  std::vector<double> alpha_buf;

  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (result.grad_inf_norm <= config.grad_tol) {
      result.converged = true;
      break;
    }

    // Two-loop recursion: direction = -H * grad.
    direction.assign(grad.begin(), grad.end());
    alpha_buf.assign(history.size(), 0.0);
    for (std::size_t k = history.size(); k-- > 0;) {
      const Pair& p = history[k];
      alpha_buf[k] = p.rho * dot(p.s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha_buf[k] * p.y[i];
    }
    if (!history.empty()) {
      const Pair& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : direction) v *= gamma;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const Pair& p = history[k];
      const double beta = p.rho * dot(p.y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += p.s[i] * (alpha_buf[k] - beta);
    }
    for (double& v : direction) v = -v;

    double descent = dot(grad, direction);
    if (descent >= 0.0) {
      // Curvature information went bad; restart from steepest descent.
      history.clear();
      for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
      descent = -dot(grad, grad);
    }

    // Armijo backtracking from unit step.
    double step = 1.0;
    bool accepted = false;
    double new_value = 0.0;
    for (int ls = 0; ls < config.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i) new_x[i] = result.x[i] + step * direction[i];
      auto candidate = objective(new_x, new_grad);
      if (candidate && *candidate <= result.value + config.armijo_c1 * step * descent) {
        new_value = *candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }

    Pair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = new_x[i] - result.x[i];
      pair.y[i] = new_grad[i] - grad[i];
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-10 * std::sqrt(dot(pair.s, pair.s)) * std::sqrt(dot(pair.y, pair.y))) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > config.memory) history.pop_front();
    }

    result.x.swap(new_x);
    grad.swap(new_grad);
    result.value = new_value;
    result.grad_inf_norm = inf_norm(grad);
    result.iterations = iter + 1;
  }

  if (!result.converged) result.converged = result.grad_inf_norm <= config.grad_tol;
  return result;
}

}  // namespace memdeblur
