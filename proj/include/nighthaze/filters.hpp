#pragma once

#include <cstddef>
#include <vector>

#include "nighthaze/image.hpp"

namespace nighthaze {

// Window half-size and regularizer of the guided filter.
struct FilterParams {
  int radius = 32;
  double epsilon = 0.01;

  void validate() const;
};

// All windowed operations use (2r+1)^2 windows clipped to the image bounds and
// normalize by the number of in-bounds pixels. Runtime does not depend on r.

PlanarImage box_mean(const PlanarImage& img, int radius);

PlanarImage window_min(const PlanarImage& img, int radius);
PlanarImage window_max(const PlanarImage& img, int radius);

// For every pixel, the flat index (y * width + x) of the maximum inside its
// clipped window. Ties go to the first occurrence in row-major order.
std::vector<std::size_t> window_argmax(const PlanarImage& img, int radius);

// Edge-preserving smoothing of `p` steered by `guide` (both one channel).
PlanarImage guided_filter(const PlanarImage& p, const PlanarImage& guide, const FilterParams& params);

// Per-pixel maximum over the RGB channels (HSV value).
PlanarImage value_channel(const PlanarImage& img);

// Per-pixel minimum over the channels.
PlanarImage channel_min(const PlanarImage& img);

// Per-pixel mean over the channels.
PlanarImage channel_mean(const PlanarImage& img);

// Nearest-rank percentile of all samples: sort ascending, take element
// ceil(rank/100 * N), clamped to [1, N].
double percentile(const PlanarImage& img, double rank);
double percentile(std::vector<double> values, double rank);

}  // namespace nighthaze
