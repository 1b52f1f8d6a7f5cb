#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vseg/color.hpp"
#include "vseg/error.hpp"
#include "vseg/image.hpp"
#include "vseg/parallel.hpp"

namespace vseg {

/// Per-pixel (u, v) displacement in pixels from frame t to t+1; a 2-channel image.
using FlowField = ImageF;

struct BilateralParams {
  double sigma_spatial = 5.0;  // pixels
  double sigma_range = 0.1;    // on [0,1] channels
};

struct FlowParams {
  double alpha = 15.0;  // smoothness weight, intensities on a 0..255 scale
  int iterations = 100;  // Jacobi sweeps per pyramid level
  int levels = 3;
};

/// Grayscale pyramid; level 0 is the source, each level ceil(previous / 2) per axis.
struct Pyramid {
  std::vector<ImageF> levels;

  int size() const { return static_cast<int>(levels.size()); }
  const ImageF& operator[](int level) const { return levels[level]; }
};

inline constexpr int kMinPyramidSide = 16;

/// Rec. 601 luma of a [0,1] RGB image.
inline ImageF to_gray(const ImageF& rgb) {
  ImageF out(rgb.width(), rgb.height(), 1);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      out(x, y) = static_cast<float>(luma(rgb(x, y, 0), rgb(x, y, 1), rgb(x, y, 2)));
    }
  }
  return out;
}

inline int kernel_radius(double sigma) { return std::max(1, static_cast<int>(std::ceil(2.0 * sigma))); }

/// Normalized 1-D Gaussian taps over [-radius, radius].
inline std::vector<double> gaussian_taps(double sigma, int radius) {
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += taps[i + radius];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

/// Separable Gaussian blur with replicated borders; window radius kernel_radius(sigma).
inline ImageF gaussian_blur(const ImageF& src, double sigma) {
  const int r = kernel_radius(sigma);
  const auto taps = gaussian_taps(sigma, r);
  ImageF tmp(src.width(), src.height(), src.channels());
  ImageF out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) acc += taps[k + r] * src.clamped(x + k, y, c);
        tmp(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        double acc = 0.0;
        for (int k = -r; k <= r; ++k) acc += taps[k + r] * tmp.clamped(x, y + k, c);
        out(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

/// Edge-preserving smoothing applied independently to every channel. The spatial window
/// matches gaussian_blur, so a very large sigma_range reproduces it.
inline ImageF bilateral_filter(const ImageF& src, double sigma_spatial, double sigma_range) {
  if (sigma_spatial <= 0 || sigma_range <= 0) throw config_error("bilateral sigmas must be positive");
  const int r = kernel_radius(sigma_spatial);
  const auto taps = gaussian_taps(sigma_spatial, r);
  const double inv_2r2 = 1.0 / (2.0 * sigma_range * sigma_range);
  ImageF out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        const double center = src(x, y, c);
        double acc = 0.0;
        double norm = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double v = src.clamped(x + dx, y + dy, c);
            const double w = taps[dx + r] * taps[dy + r] * std::exp(-(v - center) * (v - center) * inv_2r2);
            acc += w * v;
            norm += w;
          }
        }
        out(x, y, c) = static_cast<float>(acc / norm);
      }
    }
  }
  return out;
}

/// Number of levels whose coarsest side stays >= kMinPyramidSide.
inline int max_pyramid_levels(int width, int height) {
  int levels = 0;
  while (width >= kMinPyramidSide && height >= kMinPyramidSide) {
    ++levels;
    width = (width + 1) / 2;
    height = (height + 1) / 2;
  }
  return levels;
}

/// One 5-tap binomial blur + decimation step.
inline ImageF pyr_down(const ImageF& src) {
  static constexpr double k[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const int w = (src.width() + 1) / 2;
  const int h = (src.height() + 1) / 2;
  ImageF rows(w, src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        double acc = 0.0;
        for (int i = -2; i <= 2; ++i) acc += k[i + 2] * src.clamped(2 * x + i, y, c);
        rows(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  ImageF out(w, h, src.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        double acc = 0.0;
        for (int i = -2; i <= 2; ++i) acc += k[i + 2] * rows.clamped(x, 2 * y + i, c);
        out(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

inline Pyramid build_pyramid(const ImageF& frame, int levels) {
  if (levels < 1) throw config_error("pyramid needs at least one level");
  if (levels > max_pyramid_levels(frame.width(), frame.height())) {
    throw config_error("too many pyramid levels for a " + std::to_string(frame.width()) + "x" +
                       std::to_string(frame.height()) + " image");
  }
  Pyramid p;
  p.levels.push_back(frame);
  for (int l = 1; l < levels; ++l) p.levels.push_back(pyr_down(p.levels.back()));
  return p;
}

/// Bilinear sample with replicated borders.
inline float sample_bilinear(const ImageF& img, double x, double y, int c = 0) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  const double top = (1 - ax) * img.clamped(x0, y0, c) + ax * img.clamped(x0 + 1, y0, c);
  const double bottom = (1 - ax) * img.clamped(x0, y0 + 1, c) + ax * img.clamped(x0 + 1, y0 + 1, c);
  return static_cast<float>((1 - ay) * top + ay * bottom);
}

namespace flow_detail {

inline FlowField upsample_flow(const FlowField& coarse, int width, int height) {
  FlowField out(width, height, 2);
  const double sx = static_cast<double>(coarse.width()) / width;
  const double sy = static_cast<double>(coarse.height()) / height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double cx = (x + 0.5) * sx - 0.5;
      const double cy = (y + 0.5) * sy - 0.5;
      out(x, y, 0) = static_cast<float>(sample_bilinear(coarse, cx, cy, 0) / sx);
      out(x, y, 1) = static_cast<float>(sample_bilinear(coarse, cx, cy, 1) / sy);
    }
  }
  return out;
}

// Horn-Schunck sweeps on one level, linearized around `flow` (updated in place).
inline void refine_level(const ImageF& i0, const ImageF& i1, FlowField& flow, double alpha, int iterations) {
  const int w = i0.width();
  const int h = i0.height();
  ImageF ix(w, h), iy(w, h), it(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double wx = x + flow(x, y, 0);
      const double wy = y + flow(x, y, 1);
      const double warped = sample_bilinear(i1, wx, wy);
      const double gx1 = 0.5 * (sample_bilinear(i1, wx + 1, wy) - sample_bilinear(i1, wx - 1, wy));
      const double gy1 = 0.5 * (sample_bilinear(i1, wx, wy + 1) - sample_bilinear(i1, wx, wy - 1));
      const double gx0 = 0.5 * (i0.clamped(x + 1, y) - i0.clamped(x - 1, y));
      const double gy0 = 0.5 * (i0.clamped(x, y + 1) - i0.clamped(x, y - 1));
      ix(x, y) = static_cast<float>(0.5 * (gx0 + gx1));
      iy(x, y) = static_cast<float>(0.5 * (gy0 + gy1));
      it(x, y) = static_cast<float>(warped - i0(x, y));
    }
  }
  const FlowField base = flow;
  const double a2 = alpha * alpha;
  FlowField next(w, h, 2);
  for (int iter = 0; iter < iterations; ++iter) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double avg[2];
        for (int c = 0; c < 2; ++c) {
          avg[c] = (flow.clamped(x - 1, y, c) + flow.clamped(x + 1, y, c) + flow.clamped(x, y - 1, c) +
                    flow.clamped(x, y + 1, c)) / 6.0 +
                   (flow.clamped(x - 1, y - 1, c) + flow.clamped(x + 1, y - 1, c) +
                    flow.clamped(x - 1, y + 1, c) + flow.clamped(x + 1, y + 1, c)) / 12.0;
        }
        const double gx = ix(x, y);
        const double gy = iy(x, y);
        const double r = gx * (avg[0] - base(x, y, 0)) + gy * (avg[1] - base(x, y, 1)) + it(x, y);
        const double k = r / (a2 + gx * gx + gy * gy);
        next(x, y, 0) = static_cast<float>(avg[0] - gx * k);
        next(x, y, 1) = static_cast<float>(avg[1] - gy * k);
      }
    }
    std::swap(flow, next);
  }
}

inline ImageF scaled(const ImageF& img, float factor) {
  ImageF out = img;
  for (float& v : out.data()) v *= factor;
  return out;
}

}  // namespace flow_detail

/// Coarse-to-fine Horn-Schunck flow from frame_t to frame_t1 (grayscale in [0,1]).
inline FlowField dense_flow(const ImageF& frame_t, const ImageF& frame_t1, const FlowParams& params = {}) {
  if (!frame_t.same_shape(frame_t1)) throw dimension_error("flow frames differ in shape");
  if (params.alpha <= 0) throw config_error("flow alpha must be positive");
  const int levels = std::clamp(params.levels, 1, std::max(1, max_pyramid_levels(frame_t.width(), frame_t.height())));
  Pyramid p0, p1;
  p0.levels.push_back(flow_detail::scaled(frame_t, 255.0f));
  p1.levels.push_back(flow_detail::scaled(frame_t1, 255.0f));
  for (int l = 1; l < levels; ++l) {
    p0.levels.push_back(pyr_down(p0.levels.back()));
    p1.levels.push_back(pyr_down(p1.levels.back()));
  }
  FlowField flow(p0[levels - 1].width(), p0[levels - 1].height(), 2);
  for (int l = levels - 1; l >= 0; --l) {
    if (flow.width() != p0[l].width() || flow.height() != p0[l].height()) {
      flow = flow_detail::upsample_flow(flow, p0[l].width(), p0[l].height());
    }
    flow_detail::refine_level(p0[l], p1[l], flow, params.alpha, params.iterations);
  }
  return flow;
}

/// Flow for every frame of a sequence: entry t holds t -> t+1, the last entry repeats the
/// penultimate one.
inline std::vector<FlowField> flow_sequence(const std::vector<ImageF>& gray, const FlowParams& params,
                                            int threads = 1) {
  if (gray.size() < 2) throw data_error("flow needs at least 2 frames");
  const int pairs = static_cast<int>(gray.size()) - 1;
  std::vector<FlowField> flows(gray.size());
  parallel_for(pairs, threads, [&](int t) { flows[t] = dense_flow(gray[t], gray[t + 1], params); });
  flows.back() = flows[pairs - 1];
  return flows;
}

/// Standard color-wheel visualization; saturation scaled by `max_magnitude` (<= 0: auto).
inline ImageF flow_to_color(const FlowField& flow, double max_magnitude = 0.0) {
  if (max_magnitude <= 0) {
    for (int y = 0; y < flow.height(); ++y) {
      for (int x = 0; x < flow.width(); ++x) {
        max_magnitude = std::max(max_magnitude, std::hypot(double(flow(x, y, 0)), double(flow(x, y, 1))));
      }
    }
    if (max_magnitude <= 0) max_magnitude = 1.0;
  }
  ImageF out(flow.width(), flow.height(), 3);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const double u = flow(x, y, 0);
      const double v = flow(x, y, 1);
      const double mag = std::min(1.0, std::hypot(u, v) / max_magnitude);
      const double hue = (std::atan2(-v, -u) / std::numbers::pi + 1.0) * 3.0;  // [0, 6)
      const int sector = static_cast<int>(hue) % 6;
      const double f = hue - std::floor(hue);
      const double rgb6[6][3] = {{1, f, 0}, {1 - f, 1, 0}, {0, 1, f}, {0, 1 - f, 1}, {f, 0, 1}, {1, 0, 1 - f}};
      for (int c = 0; c < 3; ++c) {
        out(x, y, c) = static_cast<float>(1.0 - mag * (1.0 - rgb6[sector][c]));
      }
    }
  }
  return out;
}

}  // namespace vseg
