#pragma once

#include <string>

#include "memdeblur/dual_solver.hpp"
#include "memdeblur/fista.hpp"
#include "memdeblur/image.hpp"
#include "memdeblur/prior.hpp"

namespace memdeblur {

// Pre-processing stage ahead of deconvolution. "extern" runs an external
// denoiser as a file-in/file-out subprocess, the slot EPLL-style methods
// plug into.
struct PreStage {
  enum class Kind { kNone, kGaussian, kExtern };
  Kind kind = Kind::kNone;
  double sigma = 1.0;
  std::string command;

  // "none" | "gaussian:SIGMA" | "extern:CMD"
  static PreStage parse(const std::string& text);
};

struct PostStage {
  enum class Kind { kNone, kTv, kThreshold };
  Kind kind = Kind::kNone;
  double tv_weight = 0.1;
  int tv_iters = 50;
  double level = 0.5;

  // "none" | "tv:WEIGHT:ITERS" | "threshold:LEVEL"
  static PostStage parse(const std::string& text);
};

enum class SolverRoute { kDual, kFista };

struct PipelineConfig {
  PreStage pre;
  PostStage post;
  SolverRoute route = SolverRoute::kDual;
  PriorSpec prior;
  double alpha = 1e6;
  SolverConfig solver;
  FistaConfig fista;
  bool invert_intensity = false;  // sparse-text trick: deblur 1-x, flip back
};

// Rudin-Osher-Fatemi smoothing via Chambolle's dual projection iteration,
// fixed step 0.248.
Image tv_denoise(const Image& img, double weight, int iters);

// Binary image: 1 where intensity >= level.
Image threshold(const Image& img, double level);

// Periodic Gaussian smoothing; sigma = 0 is the identity.
Image gaussian_denoise(const Image& img, double sigma);

// Writes the image to a temp file, runs `command <in> <out>`, reads back.
Image extern_denoise(const Image& img, const std::string& command);

Image apply_pre(const Image& img, const PreStage& stage);
Image apply_post(const Image& img, const PostStage& stage);

// pre -> (optional inversion) -> dual or FISTA solve -> post.
Image run_deblur_pipeline(const Image& blurred, const Kernel& kernel,
                          const PipelineConfig& config);

// Discrete anisotropic total variation (used by diagnostics and tests).
double total_variation(const Image& img);

}  // namespace memdeblur
