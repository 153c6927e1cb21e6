#include "memdeblur/conv_operator.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace memdeblur {

namespace {
// FFTW's planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer alloc_complex(std::size_t n) {
  return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}
}  // namespace

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
  std::vector<double> y(rows());
  apply(x, y);
  return y;
}

std::vector<double> LinearOperator::apply_transpose(std::span<const double> y) const {
  std::vector<double> x(cols());
  apply_transpose(y, x);
  return x;
}

struct ConvOperator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

ConvOperator::ConvOperator(const Kernel& kernel, int height, int width)
    : kernel_(kernel), height_(height), width_(width), plans_(std::make_unique<Plans>()) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("ConvOperator: bad dimensions");
  if (kernel.size > std::min(height, width)) {
    throw std::invalid_argument("ConvOperator: kernel larger than image");
  }
  kernel_.normalize();

  const std::size_t d = static_cast<std::size_t>(height) * width;
  // Embed the kernel with its center pixel at (0,0), wrapping negative
  // offsets; this gives zero-phase convolution (no image shift).
  auto embedded = alloc_complex(d);
  for (std::size_t i = 0; i < d; ++i) embedded[i][0] = embedded[i][1] = 0.0;
  const int c = kernel_.size / 2;
  for (int i = 0; i < kernel_.size; ++i) {
    for (int j = 0; j < kernel_.size; ++j) {
      const int r = ((i - c) % height + height) % height;
      const int s = ((j - c) % width + width) % width;
      embedded[static_cast<std::size_t>(r) * width + s][0] += kernel_.at(i, j);
    }
  }

  auto scratch = alloc_complex(d);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->forward = fftw_plan_dft_2d(height, width, embedded.get(), scratch.get(),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_2d(height, width, scratch.get(), embedded.get(),
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute_dft(plans_->forward, embedded.get(), scratch.get());
  spectrum_.resize(d);
  for (std::size_t i = 0; i < d; ++i) spectrum_[i] = {scratch[i][0], scratch[i][1]};
}

ConvOperator::~ConvOperator() = default;
ConvOperator::ConvOperator(ConvOperator&&) noexcept = default;
ConvOperator& ConvOperator::operator=(ConvOperator&&) noexcept = default;

void ConvOperator::filter(std::span<const double> in, std::span<double> out, bool conjugate) const {
  const std::size_t d = static_cast<std::size_t>(rows());
  if (in.size() != d || out.size() != d) throw std::invalid_argument("ConvOperator: length mismatch");

  // fftw_malloc'd buffers share the alignment the plans were created with,
  // so the new-array execute interface is safe and reentrant here.
  auto a = alloc_complex(d);
  auto f = alloc_complex(d);
  for (std::size_t i = 0; i < d; ++i) {
    a[i][0] = in[i];
    a[i][1] = 0.0;
  }
  fftw_execute_dft(plans_->forward, a.get(), f.get());
  for (std::size_t i = 0; i < d; ++i) {
    const std::complex<double> v{f[i][0], f[i][1]};
    const std::complex<double> k = conjugate ? std::conj(spectrum_[i]) : spectrum_[i];
    const std::complex<double> p = v * k;
    f[i][0] = p.real();
    f[i][1] = p.imag();
  }
  fftw_execute_dft(plans_->backward, f.get(), a.get());
  const double scale = 1.0 / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = a[i][0] * scale;
}

void ConvOperator::apply(std::span<const double> x, std::span<double> y) const {
  filter(x, y, /*conjugate=*/false);
}

void ConvOperator::apply_transpose(std::span<const double> y, std::span<double> x) const {
  filter(y, x, /*conjugate=*/true);
}

Image ConvOperator::apply(const Image& img) const {
  if (img.height != height_ || img.width != width_) {
    throw std::invalid_argument("ConvOperator: image dimensions mismatch");
  }
  Image out(img.height, img.width, img.channels);
  for (int c = 0; c < img.channels; ++c) apply(img.channel(c), out.channel(c));
  return out;
}

ConvOperator make_operator(const Kernel& kernel, int height, int width) {
  return ConvOperator(kernel, height, width);
}

std::pair<double, double> singular_extrema(const ConvOperator& op) {
  double lo = std::abs(op.spectrum()[0]);
  double hi = lo;
  for (const auto& z : op.spectrum()) {
    const double m = std::abs(z);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return {lo, hi};
}

bool check_nonsingular(const ConvOperator& op, double floor) {
  if (floor <= 0.0) throw std::invalid_argument("check_nonsingular: floor must be > 0");
  return singular_extrema(op).first >= floor;
}

}  // namespace memdeblur
