#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nighthaze/color.hpp"
#include "nighthaze/config.hpp"
#include "nighthaze/dehaze.hpp"
#include "nighthaze/illum.hpp"

namespace nighthaze {

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

// Every map produced along the way, in pipeline order.
struct PipelineResult {
  DecompositionResult decomposition;  // L, R^
  PlanarImage compensated;            // I^ (stretched here only with StretchStage::AfterGamma)
  PlanarImage eta_raw;                // lower bound before refinement
  IncidentLightColor eta;
  PlanarImage color_corrected;        // I~ (stretched here with StretchStage::AfterColor)
  PlanarImage dark;                   // dark channel of I~
  EnvironmentalLight env;             // A
  PlanarImage transmission_raw;
  Transmission transmission;
  PlanarImage output;                 // J
  std::vector<StageTiming> timings;

  // (name, image) pairs written by --dump-intermediates.
  std::vector<std::pair<std::string, const PlanarImage*>> intermediates() const;
};

// Illumination compensation, then color correction, then dehazing. The stage
// order is fixed.
PipelineResult run_pipeline(const PlanarImage& img, const PipelineConfig& cfg);

}  // namespace nighthaze
