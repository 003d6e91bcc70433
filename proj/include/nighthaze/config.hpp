#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nighthaze/filters.hpp"

namespace nighthaze {

enum class DecomposeMode {
  SinglePass,  // filter log-illumination only, reflectance = I / L
  TwoPass,     // also guided-filter the log-reflectance residual
};

enum class StretchStage {
  AfterColor,  // stretch I~, leaving the light-color estimate untouched
  AfterGamma,  // stretch I^ before the light-color estimate
};

enum class AmplificationMode {
  PerPixel,  // channel mean computed per pixel
  Global,    // one channel mean over the whole image
};

// Every tunable of the restoration pipeline.
struct PipelineConfig {
  double gamma = 1.0 / 3.0;       // illumination compensation exponent
  double gamma0 = 1.0 / 1.2;      // light-color amplification exponent
  int patch_radius = 5;           // local patch for max/min searches
  int gf_radius = 32;
  double gf_epsilon = 0.01;
  double omega = 0.95;            // haze kept for depth perception
  double t_floor = 0.1;
  double eta_floor = 0.05;
  double stretch_lo = 5.0;        // percentile ranks
  double stretch_hi = 95.0;
  double log_floor = 1.0 / 255.0;
  bool stretch_enabled = true;
  StretchStage stretch_stage = StretchStage::AfterColor;

  DecomposeMode decompose_mode = DecomposeMode::SinglePass;
  AmplificationMode amplification = AmplificationMode::PerPixel;
  bool force_unit_eta = false;    // skip light-color estimation (eta = 1)

  FilterParams filter_params() const { return {gf_radius, gf_epsilon}; }

  // Throws ConfigError naming the offending key.
  void validate() const;

  // Sets one key from its textual value; throws ConfigError for unknown keys
  // or unparsable values.
  void set(std::string_view key, std::string_view value);

  // Canonical "key = value" lines, in a fixed order, round-trippable through
  // parse_config.
  std::string to_text() const;

  static std::vector<std::string> keys();
};

// Parses "key = value" lines with '#' comments into `cfg`. Keys prefixed with
// "run." are metadata (written into run manifests) and are skipped, so a
// manifest can be replayed as a config file.
void parse_config(std::string_view text, PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_file(const std::filesystem::path& path, PipelineConfig& cfg);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace nighthaze
