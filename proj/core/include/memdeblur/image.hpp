#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace memdeblur {

// Intensity image, nominal range [0,1], stored as channel planes each in
// row-major order. Channels is 1 (gray) or 3 (RGB).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int ch, double fill = 0.0);

  double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  double at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }

  int pixel_count() const { return height * width; }
  bool same_shape(const Image& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }
  // Plane view of one channel (length height*width).
  std::span<const double> channel(int c) const;
  std::span<double> channel(int c);

  void validate() const;  // throws std::invalid_argument on shape/finiteness violations
};

// Square PSF, odd size, nonnegative, unit sum after normalize().
struct Kernel {
  int size = 1;
  std::vector<double> weights{1.0};

  Kernel() = default;
  Kernel(int k, std::vector<double> w);

  double& at(int y, int x) { return weights[static_cast<std::size_t>(y) * size + x]; }
  double at(int y, int x) const { return weights[static_cast<std::size_t>(y) * size + x]; }

  double sum() const;
  void normalize();  // scales to unit sum; throws if sum <= 0 or any weight < 0
};

// Per-pixel known/unknown flags for a symbology region.
struct SymbologyMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> known;

  SymbologyMask() = default;
  SymbologyMask(int h, int w, bool all_known = false);
  static SymbologyMask from_image(const Image& img);  // nonzero = known

  bool at(int y, int x) const { return known[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int y, int x, bool v) { known[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  bool matches(const Image& img) const { return height == img.height && width == img.width; }
};

// Row-major flattening of one channel plane.
std::vector<double> vectorize(const Image& img, int channel);
// Inverse of vectorize for a single plane.
Image devectorize(std::span<const double> v, int height, int width);
void set_channel(Image& img, int channel, std::span<const double> v);

// Peak signal-to-noise ratio against peak 1.0, capped at 99 dB for MSE < 1e-10.
double psnr(const Image& a, const Image& b);
double mse(const Image& a, const Image& b);

// Additive i.i.d. Gaussian noise with sigma = percent/100 of unit range.
// Output is deliberately not clamped: the observation model is b = c*x + n.
Image add_gaussian_noise(const Image& img, double percent, std::uint64_t seed);

// Channel mean; identity for single-channel images.
Image to_gray(const Image& img);
Image invert_intensity(const Image& img);
Image clamp01(const Image& img);

}  // namespace memdeblur
