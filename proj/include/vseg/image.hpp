#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vseg/error.hpp"

namespace vseg {

/// Dense interleaved image. Pixel (x, y) channel c lives at ((y * width + x) * channels + c).
template <typename T>
class Image {
 public:
  Image() = default;

  Image(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw dimension_error("invalid image shape");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& operator()(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  // Replicated border.
  const T& clamped(int x, int y, int c = 0) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return data_[index(x, y, c)];
  }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  template <typename U>
  bool same_shape(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height() && channels_ == other.channels();
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.channels_ == b.channels_ &&
           a.data_ == b.data_;
  }

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using ImageF = Image<float>;
using ImageU8 = Image<std::uint8_t>;

/// Single-channel voxel grid, frame-major.
template <typename T>
class Volume {
 public:
  Volume() = default;
  Volume(int width, int height, int depth, T fill = T{})
      : width_(width), height_(height), depth_(depth),
        data_(static_cast<std::size_t>(width) * height * depth, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int depth() const { return depth_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int x, int y, int z) { return data_[index(x, y, z)]; }
  const T& operator()(int x, int y, int z) const { return data_[index(x, y, z)]; }

  bool contains(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < width_ && y < height_ && z < depth_;
  }

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * height_ + y) * width_ + x;
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  friend bool operator==(const Volume& a, const Volume& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.depth_ == b.depth_ &&
           a.data_ == b.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int depth_ = 0;
  std::vector<T> data_;
};

/// Per-frame binary masks: 1 = foreground, 0 = background.
struct MaskSequence {
  std::vector<ImageU8> frames;

  std::size_t size() const { return frames.size(); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }

  friend bool operator==(const MaskSequence&, const MaskSequence&) = default;
};

enum class TrimapCode : std::uint8_t { background = 0, foreground = 1, undetermined = 2 };

/// Per-frame ternary maps holding TrimapCode values.
struct Trimap {
  std::vector<ImageU8> frames;

  std::size_t size() const { return frames.size(); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }

  friend bool operator==(const Trimap&, const Trimap&) = default;
};

inline constexpr std::uint8_t code(TrimapCode c) { return static_cast<std::uint8_t>(c); }

}  // namespace vseg
