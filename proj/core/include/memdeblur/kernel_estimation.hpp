#pragma once

#include <utility>
#include <vector>

#include "memdeblur/conv_operator.hpp"
#include "memdeblur/dual_solver.hpp"
#include "memdeblur/image.hpp"
#include "memdeblur/prior.hpp"

namespace memdeblur {

// Linear map from kernel space R^{k^2} to the selected residual pixels:
// convolution commutes, so c * xtilde is linear in c. Row p holds the k x k
// neighborhood of xtilde around pixel p.
//
// A pixel is valid iff its whole neighborhood lies inside the patch and is
// marked known — neighborhoods are deliberately not wrapped, since symbology
// patches sit inside real images where wrap-around is fictional. When fewer
// than k^2 pixels qualify the map falls back to every mask-known pixel
// (zero-padded outside the patch) and reports itself underdetermined.
class KernelOperator final : public LinearOperator {
 public:
  KernelOperator(const Image& xtilde, const SymbologyMask& mask, int k);

  int rows() const override { return static_cast<int>(valid_.size()); }
  int cols() const override { return k_ * k_; }
  void apply(std::span<const double> kernel_vec, std::span<double> out) const override;
  void apply_transpose(std::span<const double> residual, std::span<double> out) const override;
  using LinearOperator::apply;
  using LinearOperator::apply_transpose;

  int kernel_size() const { return k_; }
  bool underdetermined() const { return underdetermined_; }
  // Flat patch indices of the selected pixels, row-major.
  const std::vector<int>& valid_pixels() const { return valid_; }

  // Restriction of a full patch vector to the valid pixels.
  std::vector<double> restrict_to_valid(std::span<const double> patch) const;

 private:
  int k_ = 1;
  bool underdetermined_ = false;
  std::vector<int> valid_;
  std::vector<double> rows_;  // rows() x cols(), row-major
};

KernelOperator build_kernel_operator(const Image& xtilde, const SymbologyMask& mask, int k);

// PSF estimation from known symbology: the entropic dual solved with the
// roles of image and kernel exchanged.
struct KernelProblem {
  Image xtilde;        // clean symbology content (same dimensions as btilde)
  Image btilde;        // blurred observation
  SymbologyMask mask;  // known-pixel flags, same dimensions
  int k = 3;
  double gamma = 1e5;  // fidelity; 1e5 noiseless, 1e3 noisy
  PriorSpec prior;     // uniform box or poisson over R^{k^2}
};

// Recovered expectation reshaped to k x k, negatives clipped at zero, then
// renormalized to unit sum.
Kernel estimate_kernel(const KernelProblem& problem, const SolverConfig& config = {});

// One kernel-estimation step then one deconvolution step; not iterative.
struct BlindConfig {
  double gamma = 1e5;
  double alpha = 1e6;
  PriorSpec kernel_prior;
  PriorSpec image_prior;
  SolverConfig solver;
};

std::pair<Image, Kernel> blind_deblur(const Image& blurred, const SymbologyMask& mask,
                                      const Image& xtilde, int k, const BlindConfig& config = {});

}  // namespace memdeblur
