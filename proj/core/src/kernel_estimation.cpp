#include "memdeblur/kernel_estimation.hpp"

#include <algorithm>
#include <stdexcept>

namespace memdeblur {

KernelOperator::KernelOperator(const Image& xtilde, const SymbologyMask& mask, int k) : k_(k) {
  if (k <= 0 || k % 2 == 0) throw std::invalid_argument("KernelOperator: k must be odd");
  if (!mask.matches(xtilde)) throw std::invalid_argument("KernelOperator: mask/patch size mismatch");
  const Image patch = to_gray(xtilde);
  const int h = patch.height, w = patch.width;
  const int c0 = k / 2;

  auto neighborhood_known = [&](int r, int s) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const int rr = r - (i - c0);
        const int ss = s - (j - c0);
        if (rr < 0 || rr >= h || ss < 0 || ss >= w || !mask.at(rr, ss)) return false;
      }
    }
    return true;
  };

  for (int r = 0; r < h; ++r) {
    for (int s = 0; s < w; ++s) {
      if (mask.at(r, s) && neighborhood_known(r, s)) valid_.push_back(r * w + s);
    }
  }
  if (static_cast<int>(valid_.size()) < k * k) {
    // Too few fully-covered pixels to determine k^2 unknowns; use every
    // known pixel instead, zero-padding neighbors outside the patch.
    underdetermined_ = true;
    valid_.clear();
    for (int r = 0; r < h; ++r) {
      for (int s = 0; s < w; ++s) {
        if (mask.at(r, s)) valid_.push_back(r * w + s);
      }
    }
  }
  if (valid_.empty()) throw std::invalid_argument("KernelOperator: no valid pixels in mask");

  rows_.resize(valid_.size() * static_cast<std::size_t>(k) * k);
  std::size_t row = 0;
  for (int p : valid_) {
    const int r = p / w, s = p % w;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const int rr = r - (i - c0);
        const int ss = s - (j - c0);
        double v = 0.0;
        if (rr >= 0 && rr < h && ss >= 0 && ss < w) v = patch.at(0, rr, ss);
        rows_[row * k * k + i * k + j] = v;
      }
    }
    ++row;
  }
}

void KernelOperator::apply(std::span<const double> kernel_vec, std::span<double> out) const {
  if (kernel_vec.size() != static_cast<std::size_t>(cols()) ||
      out.size() != static_cast<std::size_t>(rows())) {
    throw std::invalid_argument("KernelOperator: length mismatch");
  }
  const std::size_t kk = kernel_vec.size();
  for (std::size_t r = 0; r < out.size(); ++r) {
    double acc = 0.0;
    const double* row = rows_.data() + r * kk;
    for (std::size_t c = 0; c < kk; ++c) acc += row[c] * kernel_vec[c];
    out[r] = acc;
  }
}

void KernelOperator::apply_transpose(std::span<const double> residual, std::span<double> out) const {
  if (residual.size() != static_cast<std::size_t>(rows()) ||
      out.size() != static_cast<std::size_t>(cols())) {
    throw std::invalid_argument("KernelOperator: length mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t kk = out.size();
  for (std::size_t r = 0; r < residual.size(); ++r) {
    const double* row = rows_.data() + r * kk;
    const double y = residual[r];
    for (std::size_t c = 0; c < kk; ++c) out[c] += row[c] * y;
  }
}

std::vector<double> KernelOperator::restrict_to_valid(std::span<const double> patch) const {
  std::vector<double> out(valid_.size());
  for (std::size_t i = 0; i < valid_.size(); ++i) out[i] = patch[valid_[i]];
  return out;
}

KernelOperator build_kernel_operator(const Image& xtilde, const SymbologyMask& mask, int k) {
  return KernelOperator(xtilde, mask, k);
}

Kernel estimate_kernel(const KernelProblem& problem, const SolverConfig& config) {
  if (!problem.mask.matches(problem.btilde)) {
    throw std::invalid_argument("estimate_kernel: mask/observation size mismatch");
  }
  const KernelOperator op(problem.xtilde, problem.mask, problem.k);
  const Image bgray = to_gray(problem.btilde);
  const std::vector<double> b = op.restrict_to_valid(vectorize(bgray, 0));
  const Prior prior = make_prior(problem.prior, op.cols());

  DualProblem dual{op, b, prior, problem.gamma};
  const DualState state = solve_dual(dual, config);
  std::vector<double> weights = recover_expectation(dual, state);
  for (double& w : weights) w = std::max(w, 0.0);
  Kernel kernel(problem.k, std::move(weights));
  kernel.normalize();
  return kernel;
}

std::pair<Image, Kernel> blind_deblur(const Image& blurred, const SymbologyMask& mask,
                                      const Image& xtilde, int k, const BlindConfig& config) {
  KernelProblem kp{xtilde, blurred, mask, k, config.gamma, config.kernel_prior};
  Kernel estimated = estimate_kernel(kp, config.solver);
  Image restored = deconvolve(blurred, estimated, config.image_prior, config.alpha, config.solver);
  return {std::move(restored), std::move(estimated)};
}

}  // namespace memdeblur
