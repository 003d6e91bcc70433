#include "doctest.h"

#include <cmath>
#include <random>

#include "nighthaze/metrics.hpp"
#include "oracles.hpp"

using namespace nighthaze;

TEST_CASE("visual measure on constructed tilings") {
  SUBCASE("constant") {
    const VisualMeasure vm = visual_measure(PlanarImage(100, 100, 3, 128.0 / 255.0), 50);
    CHECK(vm.mean_of_means == doctest::Approx(128.0));
    CHECK(vm.mean_of_stds == doctest::Approx(0.0));
    CHECK(vm.product == doctest::Approx(0.0));
  }
  SUBCASE("alternating flat tiles") {
    PlanarImage img(100, 100, 1);
    for (int y = 0; y < 100; ++y) {
      for (int x = 0; x < 100; ++x) img.at(x, y) = ((x / 50 + y / 50) % 2 == 0) ? 0.0 : 1.0;
    }
    const VisualMeasure vm = visual_measure(img, 50);
    CHECK(vm.mean_of_means == 127.5);
    CHECK(vm.mean_of_stds == 0.0);
  }
  SUBCASE("per-tile checkerboard") {
    PlanarImage img(100, 100, 3);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 100; ++x) img.at(x, y, c) = (x + y) % 2 == 0 ? 0.0 : 1.0;
      }
    }
    const VisualMeasure vm = visual_measure(img, 50);
    CHECK(vm.mean_of_means == 127.5);
    CHECK(vm.mean_of_stds == 127.5);
    CHECK(vm.product == 16256.25);
  }
  SUBCASE("remainders are dropped") {
    PlanarImage img(60, 55, 1, 0.2);
    for (int y = 0; y < 55; ++y) {
      for (int x = 50; x < 60; ++x) img.at(x, y) = 1.0;
    }
    CHECK(visual_measure(img, 50).mean_of_means == doctest::Approx(51.0));
  }
  SUBCASE("more intra-tile contrast scores higher at equal mean") {
    PlanarImage flat(50, 50, 1, 0.5);
    PlanarImage busy(50, 50, 1);
    for (int y = 0; y < 50; ++y) {
      for (int x = 0; x < 50; ++x) busy.at(x, y) = (x % 2 == 0) ? 0.3 : 0.7;
    }
    CHECK(visual_measure(busy).product > visual_measure(flat).product);
  }
  CHECK_THROWS_AS(visual_measure(PlanarImage(49, 80, 3), 50), InvalidArgument);
}

TEST_CASE("visually good band") {
  CHECK(is_visually_good({150, 60, 9000}));
  CHECK_FALSE(is_visually_good({90, 60, 5400}));
  CHECK_FALSE(is_visually_good({150, 85, 12750}));
  CHECK(is_visually_good({100, 40, 4000}));
  CHECK(is_visually_good({200, 80, 16000}));
}

TEST_CASE("psnr") {
  std::mt19937_64 rng(71);
  const PlanarImage a = oracle::random_image(20, 15, 3, rng);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0);
  PlanarImage b = a;
  for (double& v : b.data()) v += 1.0 / 255.0;
  CHECK(std::abs(psnr(a, b) - 48.13) <= 0.01);
  const PlanarImage c = oracle::random_image(20, 15, 3, rng);
  CHECK(std::abs(psnr(a, c) - oracle::psnr(a, c)) <= 1e-9);
  CHECK(psnr(a, c) == psnr(c, a));
  CHECK_THROWS_AS(psnr(a, PlanarImage(20, 15, 1)), DimensionError);
}

TEST_CASE("rmse") {
  std::mt19937_64 rng(72);
  const PlanarImage a = oracle::random_image(12, 12, 3, rng);
  CHECK(rmse(a, a) == 0.0);
  CHECK(rmse(PlanarImage(4, 4, 1, 0.3), PlanarImage(4, 4, 1, 0.2)) == doctest::Approx(0.1));
  const PlanarImage b = oracle::random_image(12, 12, 3, rng);
  CHECK(std::abs(rmse(a, b) - oracle::rmse(a, b)) <= 1e-12);
  CHECK(rmse(a, b) == rmse(b, a));
  CHECK_THROWS_AS(rmse(a, PlanarImage(11, 12, 3)), DimensionError);
}

TEST_CASE("ssim") {
  std::mt19937_64 rng(73);
  const PlanarImage a = oracle::random_image(24, 20, 3, rng);
  CHECK(ssim(a, a) == 1.0);

  SUBCASE("constant pair closed form") {
    const double m1 = 100.0;
    const double m2 = 110.0;
    const double c1 = (0.01 * 255) * (0.01 * 255);
    const double want = (2 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
    const double got = ssim(PlanarImage(16, 16, 1, m1 / 255.0), PlanarImage(16, 16, 1, m2 / 255.0));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
  SUBCASE("windowed oracle and symmetry") {
    for (int trial = 0; trial < 3; ++trial) {
      const PlanarImage x = oracle::random_image(24, 20, 3, rng);
      const PlanarImage y = oracle::random_image(24, 20, 3, rng);
      CHECK(std::abs(ssim(x, y) - oracle::ssim(x, y)) <= 1e-6);
      CHECK(std::abs(ssim(x, y) - ssim(y, x)) <= 1e-9);
    }
  }
  SUBCASE("taps are a normalized Gaussian") {
    const auto taps = ssim_gaussian_taps();
    double sum = 0.0;
    for (double t : taps) sum += t;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(taps[5] > taps[4]);
    CHECK(taps[0] == doctest::Approx(taps[10]));
  }
  CHECK_THROWS_AS(ssim(PlanarImage(10, 30, 1), PlanarImage(10, 30, 1)), InvalidArgument);
  CHECK_THROWS_AS(ssim(a, PlanarImage(24, 21, 3)), DimensionError);
}
