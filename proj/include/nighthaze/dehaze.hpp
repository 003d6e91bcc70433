#pragma once

#include "nighthaze/config.hpp"
#include "nighthaze/image.hpp"

namespace nighthaze {

// Fraction of scene radiance reaching the camera; one channel in [t_floor, 1].
struct Transmission {
  PlanarImage t;
};

// Pointwise environmental light A, three channels in [log_floor, 1].
struct EnvironmentalLight {
  PlanarImage a;
};

// Minimum over channels, then minimum over the (2r+1)^2 clipped patch.
PlanarImage dark_channel(const PlanarImage& img, int radius);

// Unsmoothed A: for each pixel, the color of the brightest dark-channel pixel
// in its patch (first in row-major order on ties).
PlanarImage raw_env_light(const PlanarImage& i_tilde, const PipelineConfig& cfg);

// raw_env_light smoothed per channel with the V channel of I~ as guide.
EnvironmentalLight estimate_env_light(const PlanarImage& i_tilde, const PipelineConfig& cfg);

// 1 - omega * dark_channel(I~ / A), before refinement and clamping.
PlanarImage raw_transmission(const PlanarImage& i_tilde, const EnvironmentalLight& env,
                             const PipelineConfig& cfg);

// Raw transmission refined with the V channel of I~ as guide, clamped to
// [t_floor, 1].
Transmission estimate_transmission(const PlanarImage& i_tilde, const EnvironmentalLight& env,
                                   const PipelineConfig& cfg);

// J = (I~ - A) / t + A, without clamping.
PlanarImage recover_unclamped(const PlanarImage& i_tilde, const EnvironmentalLight& env,
                              const Transmission& t);

// recover_unclamped clamped to [0, 1].
PlanarImage recover(const PlanarImage& i_tilde, const EnvironmentalLight& env, const Transmission& t);

// Forward haze model I~ = J t + A (1 - t).
PlanarImage compose_haze(const PlanarImage& clear, const EnvironmentalLight& env, const Transmission& t);

}  // namespace nighthaze
