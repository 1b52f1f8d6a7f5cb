#include <gtest/gtest.h>

#include <random>

#include "vseg/color.hpp"

namespace vseg {
namespace {

TEST(RgbToLab, BlackIsZero) {
  const Vec3 lab = rgb_to_lab({0, 0, 0});
  EXPECT_NEAR(lab[0], 0.0, 1e-12);
  EXPECT_NEAR(lab[1], 0.0, 1e-12);
  EXPECT_NEAR(lab[2], 0.0, 1e-12);
}

TEST(RgbToLab, WhiteIsReferenceWhite) {
  const Vec3 lab = rgb_to_lab({1, 1, 1});
  EXPECT_NEAR(lab[0], 100.0, 1e-3);
  EXPECT_NEAR(lab[1], 0.0, 1e-3);
  EXPECT_NEAR(lab[2], 0.0, 1e-3);
}

// Reference values from scikit-image's rgb2lab (D65, 2 degree observer), an independent
// implementation using slightly different matrix constants; hence the 1e-2 tolerance.
TEST(RgbToLab, MatchesIndependentReference) {
  struct Case {
    Vec3 rgb, lab;
  };
  const Case cases[] = {
      {{0.5, 0.2, 0.8}, {40.04367127, 60.25395835, -65.67182688}},
      {{1.0, 0.0, 0.0}, {53.24058794, 80.09230823, 67.20275104}},
      {{0.25, 0.75, 0.1}, {68.40430232, -61.71525098, 64.35427937}},
  };
  for (const auto& c : cases) {
    const Vec3 lab = rgb_to_lab(c.rgb);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(lab[i], c.lab[i], 1e-2);
  }
}

TEST(RgbToLab, LightnessStaysInRange) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 lab = rgb_to_lab({u(rng), u(rng), u(rng)});
    EXPECT_GE(lab[0], 0.0);
    EXPECT_LE(lab[0], 100.0 + 1e-9);
  }
}

TEST(RgbToLab, RoundTripCornersAndRandomSamples) {
  std::vector<Vec3> samples;
  for (int i = 0; i < 8; ++i) samples.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) samples.push_back({u(rng), u(rng), u(rng)});
  for (const Vec3& rgb : samples) {
    const Vec3 back = lab_to_rgb(rgb_to_lab(rgb));
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(back[c], rgb[c], 1e-4);
  }
}

}  // namespace
}  // namespace vseg
