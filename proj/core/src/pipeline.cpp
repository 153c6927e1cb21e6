#include "memdeblur/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

#include "memdeblur/image_io.hpp"
#include "memdeblur/kernels.hpp"

namespace memdeblur {
namespace {

std::vector<std::string> split(const std::string& text, char sep, std::size_t max_parts) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (parts.size() + 1 < max_parts) {
    const auto pos = text.find(sep, start);
    if (pos == std::string::npos) break;
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  parts.push_back(text.substr(start));
  return parts;
}

// One channel of Chambolle's projection iteration for
//   min_u  |u - f|^2/2 + weight * TV(u).
void tv_denoise_channel(std::span<const double> f, std::span<double> out, int h, int w,
                        double weight, int iters) {
  const std::size_t d = static_cast<std::size_t>(h) * w;
  std::vector<double> px(d, 0.0), py(d, 0.0), div(d, 0.0);
  const double tau = 0.248;

  for (int it = 0; it < iters; ++it) {
    // div p with the adjoint boundary convention of forward differences.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        double v = px[i] + py[i];
        if (x > 0) v -= px[i - 1];
        if (y > 0) v -= py[i - w];
        div[i] = v;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const double center = div[i] - f[i] / weight;
        const double gx = x + 1 < w ? (div[i + 1] - f[i + 1] / weight) - center : 0.0;
        const double gy = y + 1 < h ? (div[i + w] - f[i + w] / weight) - center : 0.0;
        const double mag = std::sqrt(gx * gx + gy * gy);
        px[i] = (px[i] + tau * gx) / (1.0 + tau * mag);
        py[i] = (py[i] + tau * gy) / (1.0 + tau * mag);
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double v = px[i] + py[i];
      if (x > 0) v -= px[i - 1];
      if (y > 0) v -= py[i - w];
      out[i] = f[i] - weight * v;
    }
  }
}

}  // namespace

PreStage PreStage::parse(const std::string& text) {
  PreStage stage;
  if (text == "none" || text.empty()) return stage;
  const auto parts = split(text, ':', 2);
  if (parts[0] == "gaussian" && parts.size() == 2) {
    stage.kind = Kind::kGaussian;
    stage.sigma = std::stod(parts[1]);
    if (stage.sigma < 0.0) throw std::invalid_argument("pre: sigma must be >= 0");
    return stage;
  }
  if (parts[0] == "extern" && parts.size() == 2 && !parts[1].empty()) {
    stage.kind = Kind::kExtern;
    stage.command = parts[1];
    return stage;
  }
  throw std::invalid_argument("bad pre stage: " + text + " (use none|gaussian:SIGMA|extern:CMD)");
}

PostStage PostStage::parse(const std::string& text) {
  PostStage stage;
  if (text == "none" || text.empty()) return stage;
  const auto parts = split(text, ':', 3);
  if (parts[0] == "tv" && parts.size() == 3) {
    stage.kind = Kind::kTv;
    stage.tv_weight = std::stod(parts[1]);
    stage.tv_iters = std::stoi(parts[2]);
    if (stage.tv_weight <= 0.0 || stage.tv_iters <= 0) {
      throw std::invalid_argument("bad tv parameters: " + text);
    }
    return stage;
  }
  if (parts[0] == "threshold" && parts.size() >= 2) {
    stage.kind = Kind::kThreshold;
    stage.level = std::stod(parts[1]);
    if (stage.level <= 0.0 || stage.level >= 1.0) {
      throw std::invalid_argument("threshold level must be in (0,1)");
    }
    return stage;
  }
  throw std::invalid_argument("bad post stage: " + text + " (use none|tv:W:N|threshold:L)");
}

Image tv_denoise(const Image& img, double weight, int iters) {
  if (weight <= 0.0) throw std::invalid_argument("tv_denoise: weight must be > 0");
  Image out(img.height, img.width, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    tv_denoise_channel(img.channel(c), out.channel(c), img.height, img.width, weight, iters);
  }
  return out;
}

Image threshold(const Image& img, double level) {
  if (level <= 0.0 || level >= 1.0) throw std::invalid_argument("threshold: level must be in (0,1)");
  Image out = img;
  for (double& v : out.data) v = v >= level ? 1.0 : 0.0;
  return out;
}

Image gaussian_denoise(const Image& img, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_denoise: sigma must be >= 0");
  if (sigma == 0.0) return img;
  // Radius 6*sigma keeps truncated tail mass (and the semigroup defect)
  // below 1e-8; clamp so the kernel still fits the image.
  int radius = static_cast<int>(std::ceil(6.0 * sigma));
  const int max_radius = (std::min(img.height, img.width) - 1) / 2;
  radius = std::min(radius, max_radius);
  if (radius < 1) return img;
  const ConvOperator op(gaussian_kernel(sigma, radius), img.height, img.width);
  return op.apply(img);
}

Image extern_denoise(const Image& img, const std::string& command) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  const auto tag = std::to_string(std::rand()) + "_" + std::to_string(img.data.size());
  const fs::path in = dir / ("memdeblur_pre_in_" + tag + ".png");
  const fs::path out = dir / ("memdeblur_pre_out_" + tag + ".png");
  write_image(img, in.string());
  const std::string full = command + " " + in.string() + " " + out.string();
  const int rc = std::system(full.c_str());
  if (rc != 0) {
    fs::remove(in);
    throw std::runtime_error("extern denoiser failed (exit " + std::to_string(rc) + "): " + full);
  }
  Image result = read_image(out.string());
  fs::remove(in);
  fs::remove(out);
  if (!result.same_shape(img) && !(result.height == img.height && result.width == img.width)) {
    throw std::runtime_error("extern denoiser changed image dimensions");
  }
  return result;
}

Image apply_pre(const Image& img, const PreStage& stage) {
  switch (stage.kind) {
    case PreStage::Kind::kNone: return img;
    case PreStage::Kind::kGaussian: return gaussian_denoise(img, stage.sigma);
    case PreStage::Kind::kExtern: return extern_denoise(img, stage.command);
  }
  return img;
}

Image apply_post(const Image& img, const PostStage& stage) {
  switch (stage.kind) {
    case PostStage::Kind::kNone: return img;
    case PostStage::Kind::kTv: return tv_denoise(img, stage.tv_weight, stage.tv_iters);
    case PostStage::Kind::kThreshold: return threshold(img, stage.level);
  }
  return img;
}

Image run_deblur_pipeline(const Image& blurred, const Kernel& kernel,
                          const PipelineConfig& config) {
  Image work = apply_pre(blurred, config.pre);
  if (config.invert_intensity) work = invert_intensity(work);
  Image restored = config.route == SolverRoute::kDual
                       ? deconvolve(work, kernel, config.prior, config.alpha, config.solver)
                       : fista_deblur(work, kernel, config.prior, config.alpha, config.fista);
  if (config.invert_intensity) restored = invert_intensity(restored);
  return apply_post(restored, config.post);
}

double total_variation(const Image& img) {
  double tv = 0.0;
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (x + 1 < img.width) tv += std::abs(img.at(c, y, x + 1) - img.at(c, y, x));
        if (y + 1 < img.height) tv += std::abs(img.at(c, y + 1, x) - img.at(c, y, x));
      }
    }
  }
  return tv;
}

}  // namespace memdeblur
