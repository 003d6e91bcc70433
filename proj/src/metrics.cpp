#include "nighthaze/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "nighthaze/filters.hpp"

namespace nighthaze {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);

PlanarImage luminance_255(const PlanarImage& img) {
  PlanarImage lum = channel_mean(img);
  for (double& v : lum.data()) v *= 255.0;
  return lum;
}

double mean_squared_difference(const PlanarImage& a, const PlanarImage& b) {
  auto da = a.data();
  auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = da[i] - db[i];
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

// Separable Gaussian over the valid region: output is (w-10) x (h-10).
std::vector<double> gaussian_valid(const std::vector<double>& src, int w, int h,
                                   const std::array<double, 11>& taps) {
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* in = src.data() + static_cast<std::size_t>(y) * w;
    double* out = rows.data() + static_cast<std::size_t>(y) * ow;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[k] * in[x + k];
      out[x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

VisualMeasure visual_measure(const PlanarImage& img, int patch) {
  require_non_empty(img, "visual_measure");
  if (patch < 1) throw InvalidArgument("visual_measure: patch must be >= 1");
  const int tiles_x = img.width() / patch;
  const int tiles_y = img.height() / patch;
  if (tiles_x == 0 || tiles_y == 0) {
    throw InvalidArgument("visual_measure: image smaller than one " + std::to_string(patch) + "x" +
                          std::to_string(patch) + " tile");
  }
  const PlanarImage lum = luminance_255(img);
  const double n = static_cast<double>(patch) * patch;
  double sum_means = 0.0;
  double sum_stds = 0.0;
  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      double sum = 0.0;
      for (int y = ty * patch; y < (ty + 1) * patch; ++y) {
        for (int x = tx * patch; x < (tx + 1) * patch; ++x) sum += lum.at(x, y);
      }
      const double mean = sum / n;
      double sq = 0.0;
      for (int y = ty * patch; y < (ty + 1) * patch; ++y) {
        for (int x = tx * patch; x < (tx + 1) * patch; ++x) {
          const double d = lum.at(x, y) - mean;
          sq += d * d;
        }
      }
      sum_means += mean;
      sum_stds += std::sqrt(sq / n);
    }
  }
  const double tiles = static_cast<double>(tiles_x) * tiles_y;
  VisualMeasure vm;
  vm.mean_of_means = sum_means / tiles;
  vm.mean_of_stds = sum_stds / tiles;
  vm.product = vm.mean_of_means * vm.mean_of_stds;
  return vm;
}

bool is_visually_good(const VisualMeasure& vm) {
  return vm.mean_of_means >= 100.0 && vm.mean_of_means <= 200.0 && vm.mean_of_stds >= 40.0 &&
         vm.mean_of_stds <= 80.0;
}

double psnr(const PlanarImage& a, const PlanarImage& b) {
  require_non_empty(a, "psnr");
  require_same_shape(a, b, "psnr");
  const double mse = mean_squared_difference(a, b) * 255.0 * 255.0;
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(255.0 / std::sqrt(mse));
}

double rmse(const PlanarImage& a, const PlanarImage& b) {
  require_non_empty(a, "rmse");
  require_same_shape(a, b, "rmse");
  return std::sqrt(mean_squared_difference(a, b));
}

std::array<double, 11> ssim_gaussian_taps() {
  std::array<double, 11> taps{};
  double total = 0.0;
  for (int k = 0; k < kSsimWindow; ++k) {
    const double d = k - kSsimWindow / 2;
    taps[k] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    total += taps[k];
  }
  for (double& t : taps) t /= total;
  return taps;
}

double ssim(const PlanarImage& a, const PlanarImage& b) {
  require_non_empty(a, "ssim");
  require_same_shape(a, b, "ssim");
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw InvalidArgument("ssim: image smaller than the 11x11 window");
  }
  const int w = a.width();
  const int h = a.height();
  const PlanarImage la = luminance_255(a);
  const PlanarImage lb = luminance_255(b);
  const std::size_t n = la.size();
  std::vector<double> x(la.data().begin(), la.data().end());
  std::vector<double> y(lb.data().begin(), lb.data().end());
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto taps = ssim_gaussian_taps();
  const auto mu_x = gaussian_valid(x, w, h, taps);
  const auto mu_y = gaussian_valid(y, w, h, taps);
  const auto e_xx = gaussian_valid(xx, w, h, taps);
  const auto e_yy = gaussian_valid(yy, w, h, taps);
  const auto e_xy = gaussian_valid(xy, w, h, taps);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2.0 * mx * my + kSsimC1) * (2.0 * cov + kSsimC2)) /
             ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace nighthaze
