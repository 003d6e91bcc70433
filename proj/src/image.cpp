#include "nighthaze/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nighthaze {

PlanarImage::PlanarImage(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

PlanarImage PlanarImage::from_planes(const std::vector<PlanarImage>& planes) {
  if (planes.empty()) throw InvalidArgument("from_planes: no planes");
  const auto& first = planes.front();
  PlanarImage out(first.width(), first.height(), static_cast<int>(planes.size()));
  for (std::size_t c = 0; c < planes.size(); ++c) {
    out.set_channel(static_cast<int>(c), planes[c]);
  }
  return out;
}

PlanarImage PlanarImage::channel(int c) const {
  if (c < 0 || c >= channels_) throw InvalidArgument("channel index out of range");
  PlanarImage out(width_, height_, 1);
  std::ranges::copy(plane(c), out.data_.begin());
  return out;
}

void PlanarImage::set_channel(int c, const PlanarImage& plane_img) {
  if (c < 0 || c >= channels_) throw InvalidArgument("channel index out of range");
  require_channels(plane_img, 1, "set_channel");
  require_same_size(*this, plane_img, "set_channel");
  std::ranges::copy(plane_img.data(), plane(c).begin());
}

bool PlanarImage::all_finite() const noexcept {
  return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

void require_non_empty(const PlanarImage& img, const char* what) {
  if (img.empty()) throw InvalidArgument(std::string(what) + ": empty input");
}

void require_channels(const PlanarImage& img, int channels, const char* what) {
  require_non_empty(img, what);
  if (img.channels() != channels) {
    throw InvalidArgument(std::string(what) + ": expected " + std::to_string(channels) +
                          "-channel image, got " + std::to_string(img.channels()));
  }
}

void require_same_size(const PlanarImage& a, const PlanarImage& b, const char* what) {
  if (!a.same_size(b)) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) +
                         "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                         "x" + std::to_string(b.height()) + ")");
  }
}

void require_same_shape(const PlanarImage& a, const PlanarImage& b, const char* what) {
  require_same_size(a, b, what);
  if (a.channels() != b.channels()) {
    throw DimensionError(std::string(what) + ": channel count mismatch");
  }
}

void clamp_in_place(PlanarImage& img, double lo, double hi) {
  for (double& v : img.data()) v = std::clamp(v, lo, hi);
}

PlanarImage clamped(PlanarImage img, double lo, double hi) {
  clamp_in_place(img, lo, hi);
  return img;
}

}  // namespace nighthaze
