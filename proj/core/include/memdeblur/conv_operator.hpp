#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "memdeblur/image.hpp"

namespace memdeblur {

// Real linear map R^cols -> R^rows with an exact adjoint.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual void apply_transpose(std::span<const double> y, std::span<double> x) const = 0;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> y) const;
};

// Periodic (circular) convolution by a normalized PSF on an h x w grid.
// The operator is block-circulant with circulant blocks, so its spectrum is
// the 2-D DFT of the kernel embedded with its center at the spatial origin;
// singular values are the DFT-coefficient magnitudes.
class ConvOperator final : public LinearOperator {
 public:
  ConvOperator(const Kernel& kernel, int height, int width);
  ~ConvOperator() override;

  ConvOperator(const ConvOperator&) = delete;
  ConvOperator& operator=(const ConvOperator&) = delete;
  ConvOperator(ConvOperator&&) noexcept;
  ConvOperator& operator=(ConvOperator&&) noexcept;

  int rows() const override { return height_ * width_; }
  int cols() const override { return height_ * width_; }
  int height() const { return height_; }
  int width() const { return width_; }
  const Kernel& kernel() const { return kernel_; }
  std::span<const std::complex<double>> spectrum() const { return spectrum_; }

  void apply(std::span<const double> x, std::span<double> y) const override;
  void apply_transpose(std::span<const double> y, std::span<double> x) const override;
  using LinearOperator::apply;
  using LinearOperator::apply_transpose;

  // Convolves every channel of an image.
  Image apply(const Image& img) const;

 private:
  void filter(std::span<const double> in, std::span<double> out, bool conjugate) const;

  Kernel kernel_;
  int height_ = 0;
  int width_ = 0;
  std::vector<std::complex<double>> spectrum_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

ConvOperator make_operator(const Kernel& kernel, int height, int width);

// (sigma_min, sigma_max) as min/max spectrum magnitudes; exact under the
// periodic model.
std::pair<double, double> singular_extrema(const ConvOperator& op);

// True iff sigma_min >= floor. Callers decide whether to proceed; the dual
// problem stays well-posed even for singular operators.
bool check_nonsingular(const ConvOperator& op, double floor = 1e-8);

}  // namespace memdeblur
