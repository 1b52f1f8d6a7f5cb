#pragma once

#include <utility>
#include <vector>

#include "vseg/color.hpp"
#include "vseg/error.hpp"
#include "vseg/image.hpp"

namespace vseg {

/// A clip's frames as aligned per-pixel channels. `rgb` holds 3-channel values in [0,1];
/// `lab` is derived from it and has the same shape.
class FrameVolume {
 public:
  FrameVolume() = default;

  /// Takes ownership of the RGB frames and derives CIELAB. Frames must share one 3-channel
  /// shape. Loading and tracking need two or more frames; the volume itself accepts one.
  static FrameVolume from_rgb(std::vector<ImageF> rgb, double frame_rate = 30.0) {
    if (rgb.empty()) throw data_error("a clip needs at least one frame");
    for (std::size_t i = 0; i < rgb.size(); ++i) {
      if (rgb[i].channels() != 3) throw dimension_error("frame " + std::to_string(i) + " is not RGB");
      if (!rgb[i].same_shape(rgb[0])) {
        throw dimension_error("frame " + std::to_string(i) + " has mismatched dimensions");
      }
    }
    FrameVolume v;
    v.lab_.reserve(rgb.size());
    for (const auto& frame : rgb) v.lab_.push_back(to_lab(frame));
    v.rgb_ = std::move(rgb);
    v.frame_rate_ = frame_rate;
    return v;
  }

  int width() const { return rgb_.empty() ? 0 : rgb_[0].width(); }
  int height() const { return rgb_.empty() ? 0 : rgb_[0].height(); }
  int depth() const { return static_cast<int>(rgb_.size()); }
  double frame_rate() const { return frame_rate_; }

  const ImageF& rgb(int z) const { return rgb_[z]; }
  const ImageF& lab(int z) const { return lab_[z]; }
  const std::vector<ImageF>& rgb_frames() const { return rgb_; }

  /// Frames [first, last] as a new volume.
  FrameVolume slice(int first, int last) const {
    FrameVolume v;
    v.rgb_.assign(rgb_.begin() + first, rgb_.begin() + last + 1);
    v.lab_.assign(lab_.begin() + first, lab_.begin() + last + 1);
    v.frame_rate_ = frame_rate_;
    return v;
  }

  static ImageF to_lab(const ImageF& rgb) {
    ImageF lab(rgb.width(), rgb.height(), 3);
    for (int y = 0; y < rgb.height(); ++y) {
      for (int x = 0; x < rgb.width(); ++x) {
        const Vec3 l = rgb_to_lab({rgb(x, y, 0), rgb(x, y, 1), rgb(x, y, 2)});
        for (int c = 0; c < 3; ++c) lab(x, y, c) = static_cast<float>(l[c]);
      }
    }
    return lab;
  }

 private:
  std::vector<ImageF> rgb_;
  std::vector<ImageF> lab_;
  double frame_rate_ = 30.0;
};

}  // namespace vseg
