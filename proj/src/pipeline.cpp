#include "nighthaze/pipeline.hpp"

#include <chrono>

#include "nighthaze/filters.hpp"

namespace nighthaze {

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  void lap(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({std::move(stage), std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

std::vector<std::pair<std::string, const PlanarImage*>> PipelineResult::intermediates() const {
  return {
      {"illumination", &decomposition.illumination},
      {"reflectance", &decomposition.surrogate_reflectance},
      {"compensated", &compensated},
      {"eta", &eta.eta},
      {"color_corrected", &color_corrected},
      {"dark_channel", &dark},
      {"transmission_raw", &transmission_raw},
      {"transmission", &transmission.t},
      {"env_light", &env.a},
  };
}

PipelineResult run_pipeline(const PlanarImage& img, const PipelineConfig& cfg) {
  require_channels(img, 3, "run_pipeline");
  cfg.validate();

  PipelineResult r;
  StageClock clock(r.timings);

  r.decomposition = decompose(img, cfg);
  r.compensated = gamma_correct(r.decomposition, cfg.gamma);
  if (cfg.stretch_enabled && cfg.stretch_stage == StretchStage::AfterGamma) {
    r.compensated = stretch(r.compensated, cfg.stretch_lo, cfg.stretch_hi);
  }
  clock.lap("illumination");

  if (cfg.force_unit_eta) {
    r.eta_raw = PlanarImage(img.width(), img.height(), 3, 1.0);
    r.eta.eta = r.eta_raw;
  } else {
    r.eta_raw = eta_lower_bound(r.compensated, r.decomposition.illumination, cfg);
    r.eta = refine_eta(r.eta_raw, value_channel(r.compensated), cfg);
  }
  r.color_corrected = color_correct(r.compensated, r.eta, cfg.eta_floor);
  if (cfg.stretch_enabled && cfg.stretch_stage == StretchStage::AfterColor) {
    r.color_corrected = stretch(r.color_corrected, cfg.stretch_lo, cfg.stretch_hi);
  }
  clock.lap("color");

  r.dark = dark_channel(r.color_corrected, cfg.patch_radius);
  r.env = estimate_env_light(r.color_corrected, cfg);
  r.transmission_raw = raw_transmission(r.color_corrected, r.env, cfg);
  r.transmission = Transmission{guided_filter(r.transmission_raw, value_channel(r.color_corrected),
                                              cfg.filter_params())};
  clamp_in_place(r.transmission.t, cfg.t_floor, 1.0);
  r.output = recover(r.color_corrected, r.env, r.transmission);
  clock.lap("dehaze");
  return r;
}

}  // namespace nighthaze
