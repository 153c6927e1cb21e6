#include "memdeblur/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace memdeblur {

Kernel delta_kernel(int size) {
  if (size <= 0 || size % 2 == 0) throw std::invalid_argument("delta_kernel: size must be odd");
  Kernel k(size, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0));
  k.at(size / 2, size / 2) = 1.0;
  return k;
}

Kernel gaussian_kernel(double sigma, int radius) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_kernel: sigma must be >= 0");
  if (sigma == 0.0) return delta_kernel(1);
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  if (radius < 1) radius = 1;
  const int k = 2 * radius + 1;
  Kernel kernel(k, std::vector<double>(static_cast<std::size_t>(k) * k, 0.0));
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) {
      const double dy = y - radius, dx = x - radius;
      kernel.at(y, x) = std::exp(-(dx * dx + dy * dy) * inv2s2);
    }
  }
  kernel.normalize();
  return kernel;
}

Kernel motion_kernel(double length, double angle_deg) {
  if (length < 1.0) throw std::invalid_argument("motion_kernel: length must be >= 1");
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cx = std::cos(theta), cy = std::sin(theta);
  const int radius = static_cast<int>(std::ceil((length - 1.0) / 2.0));
  const int k = 2 * radius + 1;
  Kernel kernel(k, std::vector<double>(static_cast<std::size_t>(k) * k, 0.0));
  // Dense sampling along the segment, bilinear splat onto the grid.
  const int samples = std::max(64, static_cast<int>(length * 64));
  for (int i = 0; i < samples; ++i) {
    const double t = (length - 1.0) * (samples == 1 ? 0.0 : (static_cast<double>(i) / (samples - 1) - 0.5));
    const double px = radius + t * cx;
    const double py = radius + t * cy;
    const int x0 = static_cast<int>(std::floor(px));
    const int y0 = static_cast<int>(std::floor(py));
    const double fx = px - x0, fy = py - y0;
    for (int dy = 0; dy <= 1; ++dy) {
      for (int dx = 0; dx <= 1; ++dx) {
        const int x = x0 + dx, y = y0 + dy;
        if (x < 0 || x >= k || y < 0 || y >= k) continue;
        const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
        kernel.at(y, x) += w;
      }
    }
  }
  kernel.normalize();
  return kernel;
}

Kernel uniform_kernel(int size) {
  if (size <= 0 || size % 2 == 0) throw std::invalid_argument("uniform_kernel: size must be odd");
  const double w = 1.0 / (static_cast<double>(size) * size);
  return Kernel(size, std::vector<double>(static_cast<std::size_t>(size) * size, w));
}

}  // namespace memdeblur
