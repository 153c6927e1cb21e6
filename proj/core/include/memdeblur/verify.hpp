#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "memdeblur/dual_solver.hpp"
#include "memdeblur/image.hpp"
#include "memdeblur/prior.hpp"

namespace memdeblur {

// Executable check of the stability estimate: for exact minimizers,
//   |xbar_1 - xbar_2|_2 <= (2 / sigma_min(C)) |b_1 - b_2|_2.
// A 1e-3 slack factor on the bound absorbs inexact dual convergence.
struct StabilityTrial {
  double input_dist = 0.0;
  double output_dist = 0.0;
  double ratio = 0.0;
};

struct StabilityReport {
  double sigma_min = 0.0;
  double bound = 0.0;      // 2 / sigma_min
  double max_ratio = 0.0;
  bool pass = false;
  std::vector<StabilityTrial> trials;
};

StabilityReport verify_stability(const Kernel& kernel, int height, int width,
                                 const PriorSpec& prior_spec, double alpha, int trials,
                                 std::uint64_t seed, double delta_scale = 1e-3,
                                 const SolverConfig& config = {});

// Residual-versus-alpha table: the fidelity parameter is dual to a bound on
// the squared residual, so |C xbar - b|^2 is nonincreasing in alpha.
struct FidelityRow {
  double alpha = 0.0;
  double residual_sq = 0.0;
  double kl_budget = 0.0;  // 1 / (2 alpha)
};

std::vector<FidelityRow> fidelity_sweep(const Image& b, const Kernel& kernel,
                                        const PriorSpec& prior_spec,
                                        std::span<const double> alphas,
                                        const SolverConfig& config = {});

void write_stability_csv(const StabilityReport& report, std::ostream& out);
void write_fidelity_csv(std::span<const FidelityRow> rows, std::ostream& out);

}  // namespace memdeblur
