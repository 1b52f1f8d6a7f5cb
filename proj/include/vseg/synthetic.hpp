#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/image.hpp"
#include "vseg/image_file.hpp"
#include "vseg/media_io.hpp"

namespace vseg {

/// A textured rectangle translating over a static background.
struct SceneSpec {
  int width = 100;
  int height = 100;
  int frames = 30;
  int object_width = 20;
  int object_height = 20;
  int speed_x = 2;  // pixels per frame
  int speed_y = 0;
  // Top-left corner in frame 0; unset centers the object's path in the frame.
  std::optional<int> start_x;
  std::optional<int> start_y;
  bool textured_background = true;
  unsigned seed = 7;
};

struct SyntheticClip {
  std::vector<ImageF> frames;  // RGB in [0,1]
  MaskSequence truth;
};

namespace synthetic_detail {

// Sum of random plane waves per channel, around a base color.
class ColorTexture {
 public:
  ColorTexture(std::mt19937& rng, const double (&base)[3], double amplitude, double min_wl, double max_wl)
      : amplitude_(amplitude) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> wl(min_wl, max_wl);
    for (int c = 0; c < 3; ++c) {
      base_[c] = base[c];
      for (int i = 0; i < kWaves; ++i) {
        const double theta = angle(rng);
        const double k = 2.0 * std::numbers::pi / wl(rng);
        waves_[c][i] = {k * std::cos(theta), k * std::sin(theta), angle(rng)};
      }
    }
  }

  double operator()(double x, double y, int c) const {
    double s = 0.0;
    for (const auto& w : waves_[c]) s += std::sin(w.kx * x + w.ky * y + w.phase);
    return std::clamp(base_[c] + amplitude_ * s / std::sqrt(0.5 * kWaves), 0.0, 1.0);
  }

 private:
  static constexpr int kWaves = 8;
  struct Wave {
    double kx = 0, ky = 0, phase = 0;
  };
  double base_[3] = {};
  double amplitude_;
  Wave waves_[3][kWaves];
};

}  // namespace synthetic_detail

/// Deterministic scene: a reddish textured rectangle moving at a constant integer speed over a
/// bluish-green textured (or flat) background. Truth masks are exact.
inline SyntheticClip make_synthetic(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.frames < 1 || spec.object_width < 1 || spec.object_height < 1) {
    throw config_error("synthetic scene needs positive sizes");
  }
  const int travel_x = spec.speed_x * (spec.frames - 1);
  const int travel_y = spec.speed_y * (spec.frames - 1);
  const int x0 = spec.start_x.value_or((spec.width - spec.object_width - travel_x) / 2);
  const int y0 = spec.start_y.value_or((spec.height - spec.object_height - travel_y) / 2);
  for (int t : {0, spec.frames - 1}) {
    const int x = x0 + spec.speed_x * t, y = y0 + spec.speed_y * t;
    if (x < 0 || y < 0 || x + spec.object_width > spec.width || y + spec.object_height > spec.height) {
      throw config_error("synthetic object leaves the frame at frame " + std::to_string(t));
    }
  }

  std::mt19937 rng(spec.seed);
  const double bg_base[3] = {0.25, 0.55, 0.6};
  const double fg_base[3] = {0.8, 0.35, 0.2};
  const synthetic_detail::ColorTexture background(rng, bg_base, 0.18, 6.0, 20.0);
  const synthetic_detail::ColorTexture object(rng, fg_base, 0.15, 6.0, 20.0);

  SyntheticClip clip;
  for (int t = 0; t < spec.frames; ++t) {
    const int ox = x0 + spec.speed_x * t, oy = y0 + spec.speed_y * t;
    ImageF frame(spec.width, spec.height, 3);
    ImageU8 truth(spec.width, spec.height, 1, 0);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        const bool inside = x >= ox && y >= oy && x < ox + spec.object_width && y < oy + spec.object_height;
        truth(x, y) = inside;
        for (int c = 0; c < 3; ++c) {
          const double v = inside ? object(x - ox, y - oy, c)
                                  : spec.textured_background ? background(x, y, c) : bg_base[c];
          frame(x, y, c) = static_cast<float>(v);
        }
      }
    }
    clip.frames.push_back(std::move(frame));
    clip.truth.frames.push_back(std::move(truth));
  }
  return clip;
}

/// Writes `<dir>/frames/frame_%05d.png` and `<dir>/truth/truth_%05d.png` (foreground 255).
inline void write_synthetic(const SyntheticClip& clip, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "frames", ec);
  std::filesystem::create_directories(dir / "truth", ec);
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    write_image(dir / "frames" / indexed_name("frame_", static_cast<int>(t), "png"), to_u8(clip.frames[t]));
    ImageU8 m = clip.truth.frames[t];
    for (auto& v : m.data()) v = v ? 255 : 0;
    write_image(dir / "truth" / indexed_name("truth_", static_cast<int>(t), "png"), m);
  }
}

}  // namespace vseg
