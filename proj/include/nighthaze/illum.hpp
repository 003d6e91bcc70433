#pragma once

#include "nighthaze/config.hpp"
#include "nighthaze/image.hpp"

namespace nighthaze {

// Retinex-style split of a color image I into a one-channel illumination L and
// a three-channel surrogate reflectance R^ with I = L * R^ per channel.
struct DecompositionResult {
  PlanarImage illumination;           // L, in [log_floor, 1]
  PlanarImage surrogate_reflectance;  // R^, in [0, 1]
};

// Smooths log(V) with a self-guided filter, keeps log L >= log V, and divides
// the input by L. With DecomposeMode::TwoPass the log-reflectance residual is
// filtered as well, which gives up the exact reconstruction.
DecompositionResult decompose(const PlanarImage& img, const PipelineConfig& cfg);

// I^ = L^gamma * R^, clamped to [0, 1].
PlanarImage gamma_correct(const DecompositionResult& dec, double gamma);

// Per-channel affine map sending the lo/hi nearest-rank percentiles to 0 and 1,
// clamped. Channels whose percentile spread is below 1e-6 pass through.
PlanarImage stretch(const PlanarImage& img, double lo_rank, double hi_rank);

}  // namespace nighthaze
