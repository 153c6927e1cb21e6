#include "memdeblur/fista.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace memdeblur {
namespace {

// Exponential-prior prox, componentwise. The dual stationarity condition
//   u - t*l - 1/(beta - l) = 0
// is the quadratic t l^2 - (u + beta t) l + (u beta - 1) = 0; the smaller
// root is the admissible one (l < beta). Written in rationalized form to
// avoid the cancellation the textbook root suffers as t -> 0.
double prox_exponential(double u, double beta, double t) {
  const double disc = std::sqrt((u - beta * t) * (u - beta * t) + 4.0 * t);
  const double denom = u + beta * t + disc;  // > 0 since disc > |u - beta t|
  const double lambda_minus = 2.0 * (u * beta - 1.0) / denom;
  return 1.0 / (beta - lambda_minus);
}

// Scalar dual stationarity for the generic families: solve
//   psi(l) = u - t*l - K'(l) = 0
// with K the coordinate log-MGF. psi is strictly decreasing, so a bracketing
// Newton iteration with bisection safeguard is enough.
double prox_scalar_newton(const Prior& prior, int i, double u, double t) {
  auto psi = [&](double l) { return u - t * l - prior.scalar_grad(i, l); };

  // Expand a bracket [lo, hi] with psi(lo) > 0 > psi(hi).
  double lo = 0.0, hi = 0.0;
  double psi0 = psi(0.0);
  if (psi0 > 0.0) {
    lo = 0.0;
    double step = 1.0;
    hi = step;
    while (psi(hi) > 0.0) {
      lo = hi;
      step *= 2.0;
      hi += step;
      if (hi > 1e12) throw std::runtime_error("prox_v: failed to bracket");
    }
  } else {
    hi = 0.0;
    double step = 1.0;
    lo = -step;
    while (psi(lo) < 0.0) {
      hi = lo;
      step *= 2.0;
      lo -= step;
      if (lo < -1e12) throw std::runtime_error("prox_v: failed to bracket");
    }
  }

  double l = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double value = psi(l);
    if (std::abs(value) <= 1e-10 * (1.0 + std::abs(u))) break;
    if (value > 0.0) lo = l; else hi = l;
    const double slope = t + prior.scalar_hess(i, l);  // -psi'
    double next = l + value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * (1.0 + std::abs(l))) break;
    l = next;
  }
  return l;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<double> prox_v(const ProxProblem& problem) {
  if (problem.t <= 0.0) throw std::invalid_argument("prox_v: step must be > 0");
  const Prior& prior = problem.prior;
  if (problem.u.size() != static_cast<std::size_t>(prior.dimension())) {
    throw std::invalid_argument("prox_v: length mismatch");
  }
  std::vector<double> out(problem.u.size());
  if (prior.family() == PriorFamily::kExponential) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double beta = prior.mgf_domain_upper(static_cast<int>(i));
      out[i] = prox_exponential(problem.u[i], beta, problem.t);
    }
    return out;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double lambda =
        prox_scalar_newton(prior, static_cast<int>(i), problem.u[i], problem.t);
    out[i] = prior.scalar_grad(static_cast<int>(i), lambda);
  }
  return out;
}

double regularizer_value(std::span<const double> x, const Prior& prior) {
  if (x.size() != static_cast<std::size_t>(prior.dimension())) {
    throw std::invalid_argument("regularizer_value: length mismatch");
  }
  double acc = 0.0;
  switch (prior.family()) {
    case PriorFamily::kExponential:
      for (int i = 0; i < prior.dimension(); ++i) {
        const double beta = prior.mgf_domain_upper(i);
        if (x[i] <= 0.0) throw std::domain_error("regularizer_value: nonpositive component");
        acc += x[i] * beta - 1.0 - std::log(x[i] * beta);
      }
      return acc;
    case PriorFamily::kPoisson:
      for (int i = 0; i < prior.dimension(); ++i) {
        const double rate = prior.scalar_grad(i, 0.0);
        if (x[i] < 0.0) return std::numeric_limits<double>::infinity();
        acc += x[i] <= 0.0 ? rate : x[i] * std::log(x[i] / rate) - x[i] + rate;
      }
      return acc;
    case PriorFamily::kUniform:
      for (int i = 0; i < prior.dimension(); ++i) {
        if (x[i] <= prior.interval_lo(i) || x[i] >= prior.interval_hi(i)) {
          return std::numeric_limits<double>::infinity();
        }
        // Numeric conjugate: solve K'(t) = x_i, then v = t x_i - K(t).
        double lo = -1.0, hi = 1.0;
        while (prior.scalar_grad(i, hi) < x[i]) { lo = hi; hi *= 2.0; }
        while (prior.scalar_grad(i, lo) > x[i]) { hi = lo; lo *= 2.0; }
        double t = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
          t = 0.5 * (lo + hi);
          const double g = prior.scalar_grad(i, t);
          if (std::abs(g - x[i]) <= 1e-13) break;
          if (g < x[i]) lo = t; else hi = t;
          const double h = prior.scalar_hess(i, t);
          const double next = t + (x[i] - g) / h;
          if (next > lo && next < hi) { lo = std::min(lo, next); hi = std::max(hi, next); t = next; }
          if (hi - lo < 1e-14 * (1.0 + std::abs(t))) break;
        }
        acc += t * x[i] - prior.scalar_log_mgf(i, t);
      }
      return acc;
  }
  return acc;
}

std::vector<double> fista_minimize(const LinearOperator& op, std::span<const double> b,
                                   const Prior& prior, double alpha, double lipschitz,
                                   const FistaConfig& config) {
  if (lipschitz <= 0.0) throw std::invalid_argument("fista_minimize: lipschitz must be > 0");
  const std::size_t d = static_cast<std::size_t>(op.cols());
  if (b.size() != static_cast<std::size_t>(op.rows())) {
    throw std::invalid_argument("fista_minimize: length mismatch");
  }

  double L = lipschitz * config.lipschitz_scale;
  std::vector<double> x = prior.mean();
  std::vector<double> x_prev = x;
  std::vector<double> y = x;
  std::vector<double> grad(d), residual(op.rows()), candidate;
  double momentum = 1.0;

  auto smooth_at = [&](std::span<const double> p) {
    auto r = op.apply(p);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return 0.5 * alpha * dot(r, r);
  };

  for (int iter = 0; iter < config.iters; ++iter) {
    // grad of (alpha/2)|Cy - b|^2 at y.
    op.apply(y, residual);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= b[i];
    op.apply_transpose(residual, grad);
    for (double& g : grad) g *= alpha;

    while (true) {
      std::vector<double> u(d);
      for (std::size_t i = 0; i < d; ++i) u[i] = y[i] - grad[i] / L;
      candidate = prox_v(ProxProblem{std::move(u), 1.0 / L, prior});
      if (!config.backtrack) break;
      // Descent lemma check: f(p) <= f(y) + <grad, p-y> + L/2 |p-y|^2.
      double lin = 0.0, quad = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = candidate[i] - y[i];
        lin += grad[i] * diff;
        quad += diff * diff;
      }
      if (smooth_at(candidate) <= smooth_at(y) + lin + 0.5 * L * quad + 1e-12) break;
      L *= 2.0;
    }

    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double weight = (momentum - 1.0) / momentum_next;
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = candidate[i] + weight * (candidate[i] - x[i]);
    }
    x_prev.swap(x);
    x = candidate;
    momentum = momentum_next;
  }
  return x;
}

Image fista_deblur(const Image& blurred, const Kernel& kernel, const PriorSpec& prior_spec,
                   double alpha, const FistaConfig& config) {
  const ConvOperator op(kernel, blurred.height, blurred.width);
  const Prior prior = make_prior(prior_spec, op.cols());
  const double sigma_max = singular_extrema(op).second;
  const double lipschitz = alpha * sigma_max * sigma_max;
  Image out(blurred.height, blurred.width, blurred.channels);
  for (int c = 0; c < blurred.channels; ++c) {
    const auto b = vectorize(blurred, c);
    set_channel(out, c, fista_minimize(op, b, prior, alpha, lipschitz, config));
  }
  return out;
}

}  // namespace memdeblur
