#pragma once

#include <array>

#include "nighthaze/image.hpp"

namespace nighthaze {

// No-reference visual measure over non-overlapping tiles, in 8-bit units.
struct VisualMeasure {
  double mean_of_means = 0.0;  // I-bar
  double mean_of_stds = 0.0;   // sigma-bar
  double product = 0.0;        // I-bar * sigma-bar
};

// Luminance (255 x channel mean) tiled into patch x patch blocks; right and
// bottom remainders are dropped. Tile deviations are population deviations.
VisualMeasure visual_measure(const PlanarImage& img, int patch = 50);

// True iff I-bar lies in [100, 200] and sigma-bar in [40, 80].
bool is_visually_good(const VisualMeasure& vm);

// PSNR in dB over all channels on the 0-255 scale; +infinity for identical
// images.
double psnr(const PlanarImage& a, const PlanarImage& b);

// SSIM on luminance (channel mean, 0-255): 11x11 Gaussian window with
// sigma 1.5, K1 = 0.01, K2 = 0.03, averaged over positions where the window
// fits entirely inside the image.
double ssim(const PlanarImage& a, const PlanarImage& b);

// Root mean squared difference on the [0, 1] scale.
double rmse(const PlanarImage& a, const PlanarImage& b);

// Normalized 11-tap Gaussian used by ssim.
std::array<double, 11> ssim_gaussian_taps();

}  // namespace nighthaze
