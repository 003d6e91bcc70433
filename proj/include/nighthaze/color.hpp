#pragma once

#include "nighthaze/config.hpp"
#include "nighthaze/image.hpp"

namespace nighthaze {

// Per-pixel chromatic gain of the incident light, three channels in
// [eta_floor, 1].
struct IncidentLightColor {
  PlanarImage eta;
};

// Raw lower bound of the light color:
//   patch max of I^  /  max(patch max of L^gamma, log_floor)
// per channel, clamped to [log_floor, 1]. `illumination` is the stored L; the
// gamma exponent is taken from cfg.
PlanarImage eta_lower_bound(const PlanarImage& i_hat, const PlanarImage& illumination,
                            const PipelineConfig& cfg);

// Guided-filter smoothing of each channel of `raw` (guide: one channel, the V
// channel of I^ in the pipeline) followed by the m^gamma0 / m amplification,
// m being the channel mean, and clamping to [eta_floor, 1].
IncidentLightColor refine_eta(const PlanarImage& raw, const PlanarImage& guide,
                              const PipelineConfig& cfg);

// Amplification factor m^gamma0 / m for a channel mean m.
double amplification_factor(double channel_mean, double gamma0);

// I~ = I^ / max(eta, eta_floor), clamped to [0, 1].
PlanarImage color_correct(const PlanarImage& i_hat, const IncidentLightColor& eta, double eta_floor);

}  // namespace nighthaze
