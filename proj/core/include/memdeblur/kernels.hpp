#pragma once

#include "memdeblur/image.hpp"

namespace memdeblur {

// Identity blur: single unit weight at the center.
Kernel delta_kernel(int size = 1);

// Sampled isotropic Gaussian, truncated at the given radius (default
// ceil(3*sigma)) and normalized. sigma = 0 gives a delta.
Kernel gaussian_kernel(double sigma, int radius = -1);

// Linear motion blur of the given length (pixels) at angle_deg, built by
// bilinear splatting of a densely sampled segment through the center.
Kernel motion_kernel(double length, double angle_deg);

// Constant k x k kernel with weights 1/k^2.
Kernel uniform_kernel(int size);

}  // namespace memdeblur
