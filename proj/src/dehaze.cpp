#include "nighthaze/dehaze.hpp"

#include <algorithm>

#include "nighthaze/filters.hpp"

namespace nighthaze {

namespace {

void require_haze_inputs(const PlanarImage& img, const EnvironmentalLight& env,
                         const Transmission& t, const char* what) {
  require_channels(img, 3, what);
  require_same_shape(img, env.a, what);
  require_channels(t.t, 1, what);
  require_same_size(img, t.t, what);
}

}  // namespace

PlanarImage dark_channel(const PlanarImage& img, int radius) {
  require_non_empty(img, "dark_channel");
  return window_min(channel_min(img), radius);
}

PlanarImage raw_env_light(const PlanarImage& i_tilde, const PipelineConfig& cfg) {
  require_channels(i_tilde, 3, "estimate_env_light");
  const PlanarImage dark = dark_channel(i_tilde, cfg.patch_radius);
  const std::vector<std::size_t> source = window_argmax(dark, cfg.patch_radius);

  PlanarImage a(i_tilde.width(), i_tilde.height(), 3);
  for (int c = 0; c < 3; ++c) {
    auto src = i_tilde.plane(c);
    auto dst = a.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[source[i]];
  }
  return a;
}

EnvironmentalLight estimate_env_light(const PlanarImage& i_tilde, const PipelineConfig& cfg) {
  const PlanarImage raw = raw_env_light(i_tilde, cfg);
  const PlanarImage guide = value_channel(i_tilde);
  EnvironmentalLight env{PlanarImage(i_tilde.width(), i_tilde.height(), 3)};
  for (int c = 0; c < 3; ++c) {
    env.a.set_channel(c, guided_filter(raw.channel(c), guide, cfg.filter_params()));
  }
  clamp_in_place(env.a, cfg.log_floor, 1.0);
  return env;
}

PlanarImage raw_transmission(const PlanarImage& i_tilde, const EnvironmentalLight& env,
                             const PipelineConfig& cfg) {
  require_channels(i_tilde, 3, "estimate_transmission");
  require_same_shape(i_tilde, env.a, "estimate_transmission");
  PlanarImage normalized(i_tilde.width(), i_tilde.height(), 3);
  auto src = i_tilde.data();
  auto a = env.a.data();
  auto dst = normalized.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] / a[i];

  PlanarImage t = dark_channel(normalized, cfg.patch_radius);
  for (double& v : t.data()) v = 1.0 - cfg.omega * v;
  return t;
}

Transmission estimate_transmission(const PlanarImage& i_tilde, const EnvironmentalLight& env,
                                   const PipelineConfig& cfg) {
  const PlanarImage raw = raw_transmission(i_tilde, env, cfg);
  Transmission t{guided_filter(raw, value_channel(i_tilde), cfg.filter_params())};
  clamp_in_place(t.t, cfg.t_floor, 1.0);
  return t;
}

PlanarImage recover_unclamped(const PlanarImage& i_tilde, const EnvironmentalLight& env,
                              const Transmission& t) {
  require_haze_inputs(i_tilde, env, t, "recover");
  PlanarImage out(i_tilde.width(), i_tilde.height(), 3);
  auto td = t.t.data();
  for (int c = 0; c < 3; ++c) {
    auto src = i_tilde.plane(c);
    auto a = env.a.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (src[i] - a[i]) / td[i] + a[i];
  }
  return out;
}

PlanarImage recover(const PlanarImage& i_tilde, const EnvironmentalLight& env, const Transmission& t) {
  return clamped(recover_unclamped(i_tilde, env, t), 0.0, 1.0);
}

PlanarImage compose_haze(const PlanarImage& clear, const EnvironmentalLight& env, const Transmission& t) {
  require_haze_inputs(clear, env, t, "compose_haze");
  PlanarImage out(clear.width(), clear.height(), 3);
  auto td = t.t.data();
  for (int c = 0; c < 3; ++c) {
    auto j = clear.plane(c);
    auto a = env.a.plane(c);
    auto dst = out.plane(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = j[i] * td[i] + a[i] * (1.0 - td[i]);
  }
  return out;
}

}  // namespace nighthaze
