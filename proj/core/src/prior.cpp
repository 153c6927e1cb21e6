#include "memdeblur/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memdeblur {
namespace {

constexpr double kSeriesSwitch = 1e-4;  // on |t*(v-u)|
constexpr double kHessSeriesSwitch = 1e-2;
constexpr double kPoissonCap = 700.0;
constexpr double kExpMargin = 1e-12;

// Scalar log-MGF of Uniform[u,v]: log((e^{tv} - e^{tu}) / (t(v-u))).
//
// The naive formula is 0/0 at t=0 and overflows near |t| ~ 700, so we use
//   t*max(u,v)-side factoring:  m + log1p(-e^{mn-m}) - log(|t|(v-u))
// away from zero and the Taylor series
//   t(u+v)/2 + s^2/24 - s^4/2880,   s = t(v-u)
// near zero. Both branches agree to ~1e-12 at the switch point.
double uniform_log_mgf(double u, double v, double t) {
  const double s = t * (v - u);
  if (std::abs(s) < kSeriesSwitch) {
    const double s2 = s * s;
    return t * (u + v) / 2.0 + s2 / 24.0 - s2 * s2 / 2880.0;
  }
  const double tu = t * u, tv = t * v;
  const double m = std::max(tu, tv), mn = std::min(tu, tv);
  return m + std::log1p(-std::exp(mn - m)) - std::log(std::abs(t) * (v - u));
}

// Tilted mean of Uniform[u,v]: (v e^{tv} - u e^{tu})/(e^{tv} - e^{tu}) - 1/t,
// with limit (u+v)/2 at t -> 0. Always strictly inside (u, v).
double uniform_grad(double u, double v, double t) {
  const double s = t * (v - u);
  if (std::abs(s) < kSeriesSwitch) {
    const double w2 = (v - u) * (v - u);
    return (u + v) / 2.0 + t * w2 / 12.0 - t * t * t * w2 * w2 / 720.0;
  }
  if (t > 0.0) {
    const double e = std::exp(-s);  // e^{t(u-v)} in (0,1)
    return (v - u * e) / (1.0 - e) - 1.0 / t;
  }
  const double e = std::exp(s);  // s < 0, e in (0,1)
  return (v * e - u) / (e - 1.0) - 1.0 / t;
}

// Tilted variance of Uniform[u,v]: (v-u)^2 * (1/s^2 - 1/(4 sinh^2(s/2))).
double uniform_hess(double u, double v, double t) {
  const double w = v - u;
  const double s = t * w;
  const double as = std::abs(s);
  if (as < kHessSeriesSwitch) {
    const double s2 = s * s;
    return w * w * (1.0 / 12.0 - s2 / 240.0 + s2 * s2 / 6048.0);
  }
  if (as > 700.0) return 1.0 / (t * t);  // sinh term underflows
  const double sh = std::sinh(s / 2.0);
  return w * w * (1.0 / (s * s) - 1.0 / (4.0 * sh * sh));
}

}  // namespace

Prior::Prior(PriorFamily family, int d) : family_(family), dim_(d) {
  if (d <= 0) throw std::invalid_argument("Prior: dimension must be positive");
}

Prior Prior::uniform_box(int d, double lo, double hi,
                         std::span<const PinnedInterval> overrides) {
  if (!(lo < hi)) throw std::invalid_argument("Prior: degenerate interval");
  Prior p(PriorFamily::kUniform, d);
  p.a_.assign(d, lo);
  p.b_.assign(d, hi);
  for (const auto& pin : overrides) {
    if (pin.index < 0 || pin.index >= d) throw std::out_of_range("Prior: pin index out of range");
    if (!(pin.lo < pin.hi)) throw std::invalid_argument("Prior: degenerate pinned interval");
    p.a_[pin.index] = pin.lo;
    p.b_[pin.index] = pin.hi;
  }
  return p;
}

Prior Prior::exponential(int d, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("Prior: exponential rate must be > 0");
  Prior p(PriorFamily::kExponential, d);
  p.a_.assign(d, beta);
  return p;
}

Prior Prior::poisson(int d, double rate) {
  if (rate <= 0.0) throw std::invalid_argument("Prior: poisson rate must be > 0");
  Prior p(PriorFamily::kPoisson, d);
  p.a_.assign(d, rate);
  return p;
}

bool Prior::scalar_admissible(int i, double t) const {
  if (family_ == PriorFamily::kExponential) {
    return t < a_[i] - kExpMargin * std::max(1.0, a_[i]);
  }
  return true;
}

bool Prior::admissible(std::span<const double> t) const {
  if (family_ != PriorFamily::kExponential) return true;
  for (int i = 0; i < dim_; ++i) {
    if (!scalar_admissible(i, t[i])) return false;
  }
  return true;
}

double Prior::mgf_domain_upper(int i) const {
  if (family_ == PriorFamily::kExponential) return a_[i];
  return std::numeric_limits<double>::infinity();
}

double Prior::scalar_log_mgf(int i, double t) const {
  switch (family_) {
    case PriorFamily::kUniform:
      return uniform_log_mgf(a_[i], b_[i], t);
    case PriorFamily::kExponential:
      if (!scalar_admissible(i, t)) throw std::domain_error("Prior: t >= beta for exponential log-MGF");
      return -std::log1p(-t / a_[i]);
    case PriorFamily::kPoisson:
      return a_[i] * std::expm1(std::min(t, kPoissonCap));
  }
  return 0.0;
}

double Prior::scalar_grad(int i, double t) const {
  switch (family_) {
    case PriorFamily::kUniform:
      return uniform_grad(a_[i], b_[i], t);
    case PriorFamily::kExponential:
      if (!scalar_admissible(i, t)) throw std::domain_error("Prior: t >= beta for exponential log-MGF");
      return 1.0 / (a_[i] - t);
    case PriorFamily::kPoisson:
      return a_[i] * std::exp(std::min(t, kPoissonCap));
  }
  return 0.0;
}

double Prior::scalar_hess(int i, double t) const {
  switch (family_) {
    case PriorFamily::kUniform:
      return uniform_hess(a_[i], b_[i], t);
    case PriorFamily::kExponential: {
      if (!scalar_admissible(i, t)) throw std::domain_error("Prior: t >= beta for exponential log-MGF");
      const double r = a_[i] - t;
      return 1.0 / (r * r);
    }
    case PriorFamily::kPoisson:
      return a_[i] * std::exp(std::min(t, kPoissonCap));
  }
  return 0.0;
}

double Prior::log_mgf(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("Prior: length mismatch");
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i) acc += scalar_log_mgf(i, t[i]);
  return acc;
}

void Prior::grad_log_mgf(std::span<const double> t, std::span<double> g) const {
  if (t.size() != static_cast<std::size_t>(dim_) || g.size() != t.size()) {
    throw std::invalid_argument("Prior: length mismatch");
  }
  for (int i = 0; i < dim_; ++i) g[i] = scalar_grad(i, t[i]);
}

std::vector<double> Prior::grad_log_mgf(std::span<const double> t) const {
  std::vector<double> g(dim_);
  grad_log_mgf(t, g);
  return g;
}

void Prior::hess_log_mgf(std::span<const double> t, std::span<double> h) const {
  if (t.size() != static_cast<std::size_t>(dim_) || h.size() != t.size()) {
    throw std::invalid_argument("Prior: length mismatch");
  }
  for (int i = 0; i < dim_; ++i) h[i] = scalar_hess(i, t[i]);
}

std::vector<double> Prior::mean() const {
  std::vector<double> zero(dim_, 0.0);
  return grad_log_mgf(zero);
}

double Prior::interval_lo(int i) const {
  if (family_ != PriorFamily::kUniform) throw std::logic_error("Prior: not a uniform family");
  return a_[i];
}

double Prior::interval_hi(int i) const {
  if (family_ != PriorFamily::kUniform) throw std::logic_error("Prior: not a uniform family");
  return b_[i];
}

Prior make_prior(const PriorSpec& spec, int d) {
  switch (spec.family) {
    case PriorFamily::kUniform:
      return Prior::uniform_box(d, 0.0 - spec.eps, 1.0 + spec.eps, spec.pins);
    case PriorFamily::kExponential:
      return Prior::exponential(d, spec.beta);
    case PriorFamily::kPoisson:
      return Prior::poisson(d, spec.rate);
  }
  throw std::invalid_argument("make_prior: unknown family");
}

PriorFamily parse_prior_family(const std::string& name) {
  if (name == "uniform") return PriorFamily::kUniform;
  if (name == "exponential") return PriorFamily::kExponential;
  if (name == "poisson") return PriorFamily::kPoisson;
  throw std::invalid_argument("unknown prior family: " + name);
}

}  // namespace memdeblur
