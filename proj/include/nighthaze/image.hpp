#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nighthaze {

// Error hierarchy. The CLI maps each kind to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// H x W x C image of real intensities, channel-planar and row-major.
// Values are nominally in [0, 1]; 1 or 3 channels.
class PlanarImage {
 public:
  PlanarImage() = default;
  PlanarImage(int width, int height, int channels, double fill = 0.0);

  static PlanarImage from_planes(const std::vector<PlanarImage>& planes);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  std::span<double> plane(int c) noexcept {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * plane_size(), plane_size());
  }
  std::span<const double> plane(int c) const noexcept {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                                  plane_size());
  }

  double& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  double at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  // Copy of channel c as a one-channel image.
  PlanarImage channel(int c) const;
  void set_channel(int c, const PlanarImage& plane);

  bool same_size(const PlanarImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool same_shape(const PlanarImage& other) const noexcept {
    return same_size(other) && channels_ == other.channels_;
  }

  bool all_finite() const noexcept;

  friend bool operator==(const PlanarImage&, const PlanarImage&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return static_cast<std::size_t>(c) * plane_size() +
           static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Shape checks shared by every stage; throw DimensionError / InvalidArgument.
void require_non_empty(const PlanarImage& img, const char* what);
void require_channels(const PlanarImage& img, int channels, const char* what);
void require_same_size(const PlanarImage& a, const PlanarImage& b, const char* what);
void require_same_shape(const PlanarImage& a, const PlanarImage& b, const char* what);

// Pointwise helpers.
PlanarImage clamped(PlanarImage img, double lo, double hi);
void clamp_in_place(PlanarImage& img, double lo, double hi);

}  // namespace nighthaze
