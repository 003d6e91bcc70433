#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nighthaze/image.hpp"

namespace nighthaze {

using Rgb = std::array<double, 3>;

struct SynthConfig {
  double beta = 0.8;                // illumination falloff with distance
  double alpha = 0.5;               // scattered incident vs. reflected light
  Rgb light_color = {1.0, 1.0, 0.3};
  int env_patch_radius = 16;
  double env_gf_epsilon = 0.1;
  double focal_scale = 1.0;         // focal length in units of image width
  double transmission_scale = 0.8;  // t = transmission_scale * d

  void validate() const;
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

void parse_synth_config(std::string_view text, SynthConfig& cfg);

// Ground truth of one synthetic nighttime hazy scene.
struct SyntheticScene {
  PlanarImage reflectance;   // R, the clear image
  PlanarImage disparity;     // d, hole-filled and max-normalized to (0, 1]
  PlanarImage distance;      // dis, normalized to [0, 1]
  PlanarImage transmission;  // t
  PlanarImage illumination;  // L
  Rgb eta_true{};            // light color
  PlanarImage sigma;         // sigma = B / L
  PlanarImage env_light;     // B
  PlanarImage hazy;          // I

  // eta_true broadcast to a three-channel image.
  PlanarImage eta_image() const;
};

// Replaces non-positive or non-finite disparities by the nearest valid value
// (breadth-first, 4-connected). Throws InvalidArgument("degenerate disparity")
// when no valid value exists.
PlanarImage fill_disparity_holes(const PlanarImage& disparity);

// Distance from the light source at the camera origin, before normalization.
// Pinhole model: focal length focal_scale * W, principal point at the center,
// depth Z = 1 / d.
PlanarImage raw_scene_distance(const PlanarImage& disparity, double focal_scale);

// raw_scene_distance divided by its maximum.
PlanarImage scene_distance(const PlanarImage& disparity, double focal_scale);

SyntheticScene generate(const PlanarImage& reflectance, const PlanarImage& disparity,
                        const SynthConfig& cfg);

// Largest absolute residual of I = L eta R t + B (1 - t) and B = L sigma.
double forward_model_residual(const SyntheticScene& scene);

// Least-squares polynomial through the upper bound of (hazy_L, clear_L)
// pairs: hazy_L is split into 64 equal-width bins over [0, 1]; each occupied
// bin contributes the sample with the largest clear_L, weighted by the bin's
// occupancy. Coefficients are returned lowest order first.
std::vector<double> fit_illumination_poly(const PlanarImage& hazy_l, const PlanarImage& clear_l,
                                          int degree = 3);

// Horner evaluation per pixel, clamped to [floor, 1].
PlanarImage apply_poly(const PlanarImage& l, const std::vector<double>& coeffs,
                       double floor = 1.0 / 255.0);

// Writes every field of the scene as PNG (16-bit) plus manifest.txt with the
// generator config and a CRC-32 per file.
void write_scene(const std::filesystem::path& dir, const SyntheticScene& scene, const SynthConfig& cfg);

// CRC-32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace nighthaze
