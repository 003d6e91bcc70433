#include "doctest.h"

#include <random>

#include "nighthaze/color.hpp"
#include "nighthaze/filters.hpp"
#include "oracles.hpp"

using namespace nighthaze;

namespace {

PlanarImage rgb(int w, int h, double r, double g, double b) {
  PlanarImage img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  }
  return img;
}

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.gf_radius = 4;
  cfg.patch_radius = 2;
  return cfg;
}

}  // namespace

TEST_CASE("eta lower bound closed forms") {
  PipelineConfig cfg;
  cfg.gamma = 1.0;
  SUBCASE("homogeneous region") {
    const PlanarImage eta = eta_lower_bound(PlanarImage(8, 8, 3, 0.8), PlanarImage(8, 8, 1, 1.0), cfg);
    for (double v : eta.data()) CHECK(v == doctest::Approx(0.8));
  }
  SUBCASE("white light, full reflectance") {
    std::mt19937_64 rng(41);
    const PlanarImage l = oracle::random_image(10, 10, 1, rng, 0.2, 1.0);
    const PlanarImage i_hat = PlanarImage::from_planes({l, l, l});
    for (double v : oracle::values(eta_lower_bound(i_hat, l, cfg))) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(eta_lower_bound(PlanarImage(8, 8, 3), PlanarImage(8, 9, 1), cfg), DimensionError);
  }
}

TEST_CASE("eta lower bound matches the patch-ratio oracle") {
  std::mt19937_64 rng(42);
  const PipelineConfig cfg = small_config();
  for (int trial = 0; trial < 5; ++trial) {
    const PlanarImage i_hat = oracle::random_image(16, 16, 3, rng);
    const PlanarImage l = oracle::random_image(16, 16, 1, rng, 0.05, 1.0);
    PlanarImage lg = l;
    for (double& v : lg.data()) v = std::pow(v, cfg.gamma);
    const PlanarImage den = oracle::window_max(lg, cfg.patch_radius);
    const PlanarImage got = eta_lower_bound(i_hat, l, cfg);
    for (int c = 0; c < 3; ++c) {
      const PlanarImage num = oracle::window_max(i_hat.channel(c), cfg.patch_radius);
      for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
          const double want =
              std::clamp(num.at(x, y) / std::max(den.at(x, y), cfg.log_floor), cfg.log_floor, 1.0);
          CHECK(got.at(x, y, c) == want);
        }
      }
    }
  }
}

TEST_CASE("refine_eta amplification") {
  const PipelineConfig cfg = small_config();
  const PlanarImage guide(10, 10, 1, 0.5);
  SUBCASE("mid gray") {
    const IncidentLightColor eta = refine_eta(rgb(10, 10, 0.5, 0.5, 0.5), guide, cfg);
    for (double v : eta.eta.data()) CHECK(std::abs(v - 0.5613) <= 1e-4);
  }
  SUBCASE("white is a fixed point") {
    const IncidentLightColor eta = refine_eta(rgb(10, 10, 1, 1, 1), guide, cfg);
    for (double v : eta.eta.data()) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("factor is at least 1 for means up to 1") {
    for (double m = 0.05; m <= 1.0; m += 0.05) CHECK(amplification_factor(m, cfg.gamma0) >= 1.0);
    CHECK(amplification_factor(0.5, 1.0 / 1.2) == doctest::Approx(std::pow(0.5, -1.0 / 6.0)));
  }
  SUBCASE("output bounds and smoothing") {
    std::mt19937_64 rng(43);
    const PlanarImage raw = oracle::random_image(32, 32, 3, rng, 0.0, 1.0);
    const PlanarImage g = oracle::random_image(32, 32, 1, rng);
    const IncidentLightColor eta = refine_eta(raw, g, cfg);
    for (double v : eta.eta.data()) {
      CHECK(v >= cfg.eta_floor);
      CHECK(v <= 1.0);
    }
    const PlanarImage smooth_guide = PlanarImage(32, 32, 1, 0.4);
    const IncidentLightColor smooth = refine_eta(raw, smooth_guide, cfg);
    for (int c = 0; c < 3; ++c) {
      CHECK(oracle::mean_abs_laplacian(smooth.eta, c) <= oracle::mean_abs_laplacian(raw, c));
    }
  }
  SUBCASE("global mode uses one factor") {
    PipelineConfig global = cfg;
    global.amplification = AmplificationMode::Global;
    PlanarImage raw = rgb(10, 10, 0.5, 0.5, 0.5);
    const IncidentLightColor eta = refine_eta(raw, guide, global);
    CHECK(eta.eta.at(3, 3, 0) == doctest::Approx(0.5613).epsilon(1e-3));
  }
}

TEST_CASE("white light gives a gray estimate") {
  // A scene lit by white light: I = L * R with per-pixel gray reflectance
  // variations and no color cast.
  std::mt19937_64 rng(44);
  PipelineConfig cfg = small_config();
  const PlanarImage l = oracle::box_mean(oracle::random_image(48, 48, 1, rng, 0.3, 1.0), 6);
  PlanarImage i_hat(48, 48, 3);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      const double r = u(rng);
      for (int c = 0; c < 3; ++c) i_hat.at(x, y, c) = std::pow(l.at(x, y), cfg.gamma) * r * u(rng);
    }
  }
  const IncidentLightColor eta =
      refine_eta(eta_lower_bound(i_hat, l, cfg), value_channel(i_hat), cfg);
  double means[3] = {0, 0, 0};
  for (int c = 0; c < 3; ++c) {
    for (double v : eta.eta.plane(c)) means[c] += v;
    means[c] /= static_cast<double>(eta.eta.plane_size());
  }
  CHECK(std::max({means[0], means[1], means[2]}) - std::min({means[0], means[1], means[2]}) <= 0.1);
}

TEST_CASE("color correction") {
  const double floor = 0.05;
  CHECK(color_correct(PlanarImage(2, 2, 3, 0.4), {PlanarImage(2, 2, 3, 0.8)}, floor).at(1, 1, 2) ==
        doctest::Approx(0.5));
  const PlanarImage out =
      color_correct(rgb(3, 3, 0.6, 0.6, 0.18), {rgb(3, 3, 1.0, 1.0, 0.3)}, floor);
  CHECK(out.at(1, 1, 0) == doctest::Approx(0.6));
  CHECK(out.at(1, 1, 1) == doctest::Approx(0.6));
  CHECK(out.at(1, 1, 2) == doctest::Approx(0.6));

  std::mt19937_64 rng(45);
  const PlanarImage img = oracle::random_image(9, 9, 3, rng);
  CHECK(color_correct(img, {PlanarImage(9, 9, 3, 1.0)}, floor) == img);
  // The floor bounds the gain.
  CHECK(color_correct(PlanarImage(1, 1, 3, 0.01), {PlanarImage(1, 1, 3, 0.0)}, floor).at(0, 0, 0) ==
        doctest::Approx(0.2));
  CHECK_THROWS_AS(color_correct(img, {PlanarImage(8, 9, 3, 1.0)}, floor), DimensionError);
}
