#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace memdeblur {

enum class PriorFamily { kUniform, kExponential, kPoisson };

// Per-coordinate independent prior exposed through its log moment-generating
// function, the gradient (tilted mean), and the diagonal Hessian (tilted
// variance). The gradient at C^T(lambda) of the dual maximizer is the
// recovered image, so these three evaluations are the entire interface the
// solvers need.
class Prior {
 public:
  struct PinnedInterval {
    int index;
    double lo;
    double hi;
  };

  // Independent Uniform[lo,hi] coordinates, with optional per-coordinate
  // interval overrides (pinned pixels).
  static Prior uniform_box(int d, double lo, double hi,
                           std::span<const PinnedInterval> overrides = {});
  // Independent Exponential(beta) coordinates; log-MGF domain is t < beta.
  static Prior exponential(int d, double beta);
  // Independent Poisson(rate) coordinates. Unbounded support; dual arguments
  // are saturated at +700 to keep exp() finite.
  static Prior poisson(int d, double rate);

  PriorFamily family() const { return family_; }
  int dimension() const { return dim_; }

  // Strict domain membership (with margin) for the log-MGF argument.
  bool admissible(std::span<const double> t) const;
  // Per-coordinate open upper bound of the admissible set (+inf except for
  // Exponential, where it is beta_i).
  double mgf_domain_upper(int i) const;

  double log_mgf(std::span<const double> t) const;
  void grad_log_mgf(std::span<const double> t, std::span<double> g) const;
  std::vector<double> grad_log_mgf(std::span<const double> t) const;
  // Diagonal of the Hessian of log_mgf (coordinates are independent).
  void hess_log_mgf(std::span<const double> t, std::span<double> h) const;

  std::vector<double> mean() const;  // grad_log_mgf(0)

  // Scalar evaluations for coordinate i (used by the separable prox solver).
  double scalar_log_mgf(int i, double t) const;
  double scalar_grad(int i, double t) const;
  double scalar_hess(int i, double t) const;
  bool scalar_admissible(int i, double t) const;

  // Uniform interval accessors (throws for other families).
  double interval_lo(int i) const;
  double interval_hi(int i) const;

 private:
  Prior(PriorFamily family, int d);

  PriorFamily family_;
  int dim_;
  std::vector<double> a_;  // uniform: lo; exponential: beta; poisson: rate
  std::vector<double> b_;  // uniform: hi
};

// Run-configuration description of a prior: family name + parameters +
// optional per-pixel override list.
struct PriorSpec {
  PriorFamily family = PriorFamily::kUniform;
  double eps = 0.01;    // uniform box buffer: coordinates default to [0-eps, 1+eps]
  double beta = 400.0;  // exponential rate
  double rate = 0.05;   // poisson rate
  std::vector<Prior::PinnedInterval> pins;
};

Prior make_prior(const PriorSpec& spec, int d);
PriorFamily parse_prior_family(const std::string& name);

}  // namespace memdeblur
