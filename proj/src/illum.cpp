#include "nighthaze/illum.hpp"

#include <algorithm>
#include <cmath>

#include "nighthaze/filters.hpp"

namespace nighthaze {

namespace {

constexpr double kFlatChannelSpread = 1e-6;

}  // namespace

DecompositionResult decompose(const PlanarImage& img, const PipelineConfig& cfg) {
  require_channels(img, 3, "decompose");
  cfg.validate();

  PlanarImage log_v = value_channel(img);
  for (double& v : log_v.data()) v = std::log(std::max(v, cfg.log_floor));

  const PlanarImage log_l = guided_filter(log_v, log_v, cfg.filter_params());

  DecompositionResult out;
  out.illumination = PlanarImage(img.width(), img.height(), 1);
  {
    auto lv = log_v.data();
    auto ll = log_l.data();
    auto l = out.illumination.data();
    for (std::size_t i = 0; i < l.size(); ++i) {
      l[i] = std::clamp(std::exp(std::max(ll[i], lv[i])), cfg.log_floor, 1.0);
    }
  }

  out.surrogate_reflectance = PlanarImage(img.width(), img.height(), 3);
  auto l = out.illumination.data();
  for (int c = 0; c < 3; ++c) {
    auto src = img.plane(c);
    auto dst = out.surrogate_reflectance.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(src[i] / l[i], 0.0, 1.0);
  }

  if (cfg.decompose_mode == DecomposeMode::TwoPass) {
    // rr = ii - ll, smoothed in the log domain with itself as the guide.
    for (int c = 0; c < 3; ++c) {
      PlanarImage log_r = out.surrogate_reflectance.channel(c);
      for (double& v : log_r.data()) v = std::log(std::max(v, cfg.log_floor));
      PlanarImage smoothed = guided_filter(log_r, log_r, cfg.filter_params());
      for (double& v : smoothed.data()) v = std::clamp(std::exp(v), 0.0, 1.0);
      out.surrogate_reflectance.set_channel(c, smoothed);
    }
  }
  return out;
}

PlanarImage gamma_correct(const DecompositionResult& dec, double gamma) {
  const PlanarImage& l = dec.illumination;
  const PlanarImage& r = dec.surrogate_reflectance;
  require_channels(l, 1, "gamma_correct");
  require_channels(r, 3, "gamma_correct");
  require_same_size(l, r, "gamma_correct");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma_correct: gamma must be in (0, 1]");

  PlanarImage lg = l;
  for (double& v : lg.data()) v = std::pow(v, gamma);

  PlanarImage out(r.width(), r.height(), 3);
  auto ld = lg.data();
  for (int c = 0; c < 3; ++c) {
    auto src = r.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(ld[i] * src[i], 0.0, 1.0);
  }
  return out;
}

PlanarImage stretch(const PlanarImage& img, double lo_rank, double hi_rank) {
  require_non_empty(img, "stretch");
  if (!(lo_rank < hi_rank)) throw InvalidArgument("stretch: lo_rank must be below hi_rank");

  PlanarImage out = img;
  for (int c = 0; c < img.channels(); ++c) {
    const std::vector<double> values(img.plane(c).begin(), img.plane(c).end());
    const double lo = percentile(values, lo_rank);
    const double hi = percentile(values, hi_rank);
    if (hi - lo < kFlatChannelSpread) continue;
    const double spread = hi - lo;
    for (double& v : out.plane(c)) v = std::clamp((v - lo) / spread, 0.0, 1.0);
  }
  return out;
}

}  // namespace nighthaze
