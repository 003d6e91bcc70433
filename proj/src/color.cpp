#include "nighthaze/color.hpp"

#include <algorithm>
#include <cmath>

#include "nighthaze/filters.hpp"

namespace nighthaze {

PlanarImage eta_lower_bound(const PlanarImage& i_hat, const PlanarImage& illumination,
                            const PipelineConfig& cfg) {
  require_channels(i_hat, 3, "eta_lower_bound");
  require_channels(illumination, 1, "eta_lower_bound");
  require_same_size(i_hat, illumination, "eta_lower_bound");

  PlanarImage lg = illumination;
  for (double& v : lg.data()) v = std::pow(v, cfg.gamma);
  const PlanarImage denom = window_max(lg, cfg.patch_radius);
  const PlanarImage numer = window_max(i_hat, cfg.patch_radius);

  PlanarImage out(i_hat.width(), i_hat.height(), 3);
  auto d = denom.data();
  for (int c = 0; c < 3; ++c) {
    auto n = numer.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::clamp(n[i] / std::max(d[i], cfg.log_floor), cfg.log_floor, 1.0);
    }
  }
  return out;
}

double amplification_factor(double channel_mean, double gamma0) {
  return std::pow(channel_mean, gamma0) / channel_mean;
}

IncidentLightColor refine_eta(const PlanarImage& raw, const PlanarImage& guide,
                              const PipelineConfig& cfg) {
  require_channels(raw, 3, "refine_eta");
  require_channels(guide, 1, "refine_eta");
  require_same_size(raw, guide, "refine_eta");

  IncidentLightColor out;
  out.eta = PlanarImage(raw.width(), raw.height(), 3);
  for (int c = 0; c < 3; ++c) {
    out.eta.set_channel(c, guided_filter(raw.channel(c), guide, cfg.filter_params()));
  }

  // The factor is computed on the smoothed estimate, before clamping.
  const std::size_t n = out.eta.plane_size();
  std::vector<double> mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] = (out.eta.plane(0)[i] + out.eta.plane(1)[i] + out.eta.plane(2)[i]) / 3.0;
  }
  if (cfg.amplification == AmplificationMode::Global) {
    double total = 0.0;
    for (double m : mean) total += m;
    std::ranges::fill(mean, total / static_cast<double>(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double f = amplification_factor(std::max(mean[i], cfg.eta_floor), cfg.gamma0);
    for (int c = 0; c < 3; ++c) {
      double& v = out.eta.plane(c)[i];
      v = std::clamp(v * f, cfg.eta_floor, 1.0);
    }
  }
  return out;
}

PlanarImage color_correct(const PlanarImage& i_hat, const IncidentLightColor& eta, double eta_floor) {
  require_channels(i_hat, 3, "color_correct");
  require_same_shape(i_hat, eta.eta, "color_correct");
  PlanarImage out(i_hat.width(), i_hat.height(), 3);
  auto src = i_hat.data();
  auto e = eta.eta.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = std::clamp(src[i] / std::max(e[i], eta_floor), 0.0, 1.0);
  }
  return out;
}

}  // namespace nighthaze
