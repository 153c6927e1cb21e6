#include "memdeblur/image.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace memdeblur {

Image::Image(int h, int w, int ch, double fill)
    : height(h), width(w), channels(ch),
      data(static_cast<std::size_t>(h) * w * ch, fill) {
  if (h <= 0 || w <= 0 || (ch != 1 && ch != 3)) {
    throw std::invalid_argument("Image: dimensions must be positive and channels 1 or 3");
  }
}

std::span<const double> Image::channel(int c) const {
  return {data.data() + static_cast<std::size_t>(c) * pixel_count(),
          static_cast<std::size_t>(pixel_count())};
}

std::span<double> Image::channel(int c) {
  return {data.data() + static_cast<std::size_t>(c) * pixel_count(),
          static_cast<std::size_t>(pixel_count())};
}

void Image::validate() const {
  if (data.size() != static_cast<std::size_t>(height) * width * channels) {
    throw std::invalid_argument("Image: data length != height*width*channels");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument("Image: non-finite intensity");
  }
}

Kernel::Kernel(int k, std::vector<double> w) : size(k), weights(std::move(w)) {
  if (k <= 0 || k % 2 == 0) throw std::invalid_argument("Kernel: size must be odd and positive");
  if (weights.size() != static_cast<std::size_t>(k) * k) {
    throw std::invalid_argument("Kernel: weight count != size*size");
  }
}

double Kernel::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void Kernel::normalize() {
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("Kernel: negative weight");
  }
  const double s = sum();
  if (s <= 0.0) throw std::invalid_argument("Kernel: nonpositive total weight");
  for (double& w : weights) w /= s;
}

SymbologyMask::SymbologyMask(int h, int w, bool all_known)
    : height(h), width(w), known(static_cast<std::size_t>(h) * w, all_known ? 1 : 0) {}

SymbologyMask SymbologyMask::from_image(const Image& img) {
  SymbologyMask m(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double v = 0.0;
      for (int c = 0; c < img.channels; ++c) v += img.at(c, y, x);
      m.set(y, x, v > 0.0);
    }
  }
  return m;
}

std::vector<double> vectorize(const Image& img, int channel) {
  if (channel < 0 || channel >= img.channels) {
    throw std::out_of_range("vectorize: channel out of range");
  }
  auto plane = img.channel(channel);
  return {plane.begin(), plane.end()};
}

Image devectorize(std::span<const double> v, int height, int width) {
  if (v.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("devectorize: length != height*width");
  }
  Image img(height, width, 1);
  std::copy(v.begin(), v.end(), img.data.begin());
  return img;
}

void set_channel(Image& img, int channel, std::span<const double> v) {
  if (channel < 0 || channel >= img.channels) {
    throw std::out_of_range("set_channel: channel out of range");
  }
  if (v.size() != static_cast<std::size_t>(img.pixel_count())) {
    throw std::invalid_argument("set_channel: length mismatch");
  }
  std::copy(v.begin(), v.end(), img.channel(channel).begin());
}

double mse(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mse: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m < 1e-10) return 99.0;
  return 10.0 * std::log10(1.0 / m);
}

Image add_gaussian_noise(const Image& img, double percent, std::uint64_t seed) {
  if (percent < 0.0) throw std::invalid_argument("add_gaussian_noise: percent must be >= 0");
  Image out = img;
  if (percent == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, percent / 100.0);
  for (double& v : out.data) v += normal(rng);
  return out;
}

Image to_gray(const Image& img) {
  if (img.channels == 1) return img;
  Image out(img.height, img.width, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double v = 0.0;
      for (int c = 0; c < img.channels; ++c) v += img.at(c, y, x);
      out.at(0, y, x) = v / img.channels;
    }
  }
  return out;
}

Image invert_intensity(const Image& img) {
  Image out = img;
  for (double& v : out.data) v = 1.0 - v;
  return out;
}

Image clamp01(const Image& img) {
  Image out = img;
  for (double& v : out.data) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  return out;
}

}  // namespace memdeblur
