#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/media_io.hpp"
#include "vseg/parallel.hpp"
#include "vseg/preprocess.hpp"

namespace vseg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// One tracked point over a tracking window. positions[k] and alive[k] refer to frame
/// window_start + k. Once a point is lost it stays lost; its position is then frozen at the
/// last tracked location.
struct Trajectory {
  Point2 seed;
  int window_start = 0;
  std::vector<Point2> positions;
  std::vector<std::uint8_t> alive;

  int length() const { return static_cast<int>(positions.size()); }
  bool alive_throughout() const {
    return !alive.empty() && std::all_of(alive.begin(), alive.end(), [](std::uint8_t a) { return a != 0; });
  }
};

struct TrackingConfig {
  int grid_interval = 10;       // pixels between seeds
  int window_length = 5;        // frames between grid re-seeds
  int pyramid_levels = 3;
  int lk_window = 15;           // square window side, pixels
  int max_iterations = 30;
  double convergence_eps = 0.01;  // pixels
  double fb_threshold = 1.5;      // forward-backward error, pixels
  double min_eigenvalue = 1e-4;   // normalized structure-tensor floor, intensities in [0,1]
};

/// One seed at the center of every complete interval-sized grid cell, row-major.
inline std::vector<Point2> seed_grid(int width, int height, int grid_interval) {
  if (grid_interval < 2) throw config_error("grid interval must be at least 2");
  std::vector<Point2> seeds;
  const int offset = grid_interval / 2;
  for (int j = 0; j < height / grid_interval; ++j) {
    for (int i = 0; i < width / grid_interval; ++i) {
      seeds.push_back({static_cast<double>(i * grid_interval + offset), static_cast<double>(j * grid_interval + offset)});
    }
  }
  return seeds;
}

/// Tracking windows starting every `window_length` frames. Each window runs through the next
/// window's first frame, so consecutive windows share one frame and every frame pair is
/// tracked. A trailing single-frame window is dropped (its frame is already the previous
/// window's last).
inline std::vector<FrameRange> reacquire_schedule(int total_frames, int window_length) {
  if (window_length < 2) throw config_error("window length must be at least 2");
  std::vector<FrameRange> windows;
  for (int start = 0; start < total_frames; start += window_length) {
    const int end = std::min(start + window_length, total_frames - 1);
    if (end > start) windows.push_back({start, end});
  }
  return windows;
}

namespace lk_detail {

struct LkResult {
  Point2 position;
  bool ok = false;
};

// Pyramidal Lucas-Kanade for one point, translation-only (Bouguet's scheme).
inline LkResult track_point(const Pyramid& from, const Pyramid& to, Point2 start, const TrackingConfig& cfg) {
  const int half = cfg.lk_window / 2;
  const int levels = std::min(from.size(), to.size());
  double gx = 0.0;
  double gy = 0.0;
  const int n = (2 * half + 1) * (2 * half + 1);
  std::vector<double> tmpl(n), dx(n), dy(n);
  for (int level = levels - 1; level >= 0; --level) {
    const ImageF& img = from[level];
    const ImageF& next = to[level];
    const double scale = std::ldexp(1.0, -level);
    const double px = start.x * scale;
    const double py = start.y * scale;

    // Window samples outside either frame carry replicated border values, not scene content,
    // so they are left out of both the structure tensor and the mismatch vector.
    std::vector<std::uint8_t> inside(n);
    int k = 0;
    for (int wy = -half; wy <= half; ++wy) {
      for (int wx = -half; wx <= half; ++wx, ++k) {
        const double sx = px + wx;
        const double sy = py + wy;
        inside[k] = sx >= 0 && sy >= 0 && sx <= img.width() - 1 && sy <= img.height() - 1;
        tmpl[k] = sample_bilinear(img, sx, sy);
        dx[k] = 0.5 * (sample_bilinear(img, sx + 1, sy) - sample_bilinear(img, sx - 1, sy));
        dy[k] = 0.5 * (sample_bilinear(img, sx, sy + 1) - sample_bilinear(img, sx, sy - 1));
      }
    }

    double vx = 0.0;
    double vy = 0.0;
    bool converged = false;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
      double gxx = 0.0, gxy = 0.0, gyy = 0.0;
      double bx = 0.0;
      double by = 0.0;
      k = 0;
      for (int wy = -half; wy <= half; ++wy) {
        for (int wx = -half; wx <= half; ++wx, ++k) {
          if (!inside[k]) continue;
          const double tx = px + gx + vx + wx;
          const double ty = py + gy + vy + wy;
          if (tx < 0 || ty < 0 || tx > next.width() - 1 || ty > next.height() - 1) continue;
          const double diff = tmpl[k] - sample_bilinear(next, tx, ty);
          gxx += dx[k] * dx[k];
          gxy += dx[k] * dy[k];
          gyy += dy[k] * dy[k];
          bx += diff * dx[k];
          by += diff * dy[k];
        }
      }
      const double trace_half = 0.5 * (gxx + gyy);
      const double min_eig = trace_half - std::sqrt(0.25 * (gxx - gyy) * (gxx - gyy) + gxy * gxy);
      const double det = gxx * gyy - gxy * gxy;
      // Too flat to solve: fatal at full resolution, otherwise this level's refinement is
      // skipped and the finer levels take over.
      if (min_eig / n < cfg.min_eigenvalue || det <= 0.0) {
        if (level == 0) return {start, false};
        break;
      }
      const double ex = (gyy * bx - gxy * by) / det;
      const double ey = (gxx * by - gxy * bx) / det;
      vx += ex;
      vy += ey;
      if (ex * ex + ey * ey < cfg.convergence_eps * cfg.convergence_eps) {
        converged = true;
        break;
      }
    }
    if (level == 0) {
      if (!converged) return {start, false};
      return {{start.x + gx + vx, start.y + gy + vy}, true};
    }
    gx = 2.0 * (gx + vx);
    gy = 2.0 * (gy + vy);
  }
  return {start, false};
}

}  // namespace lk_detail

/// Grayscale pyramids for every frame, at most `levels` deep.
inline std::vector<Pyramid> tracking_pyramids(const std::vector<ImageF>& gray, int levels, int threads = 1) {
  std::vector<Pyramid> out(gray.size());
  if (gray.empty()) return out;
  const int usable = std::clamp(levels, 1, std::max(1, max_pyramid_levels(gray[0].width(), gray[0].height())));
  parallel_for(static_cast<int>(gray.size()), threads, [&](int i) {
    if (gray[i].width() < kMinPyramidSide || gray[i].height() < kMinPyramidSide) {
      out[i].levels = {gray[i]};
    } else {
      out[i] = build_pyramid(gray[i], usable);
    }
  });
  return out;
}

/// Tracks `seeds` from window.first through window.last. A point is lost when LK fails to
/// converge, when it leaves the frame, or when its forward-backward error exceeds
/// fb_threshold.
inline std::vector<Trajectory> track_window(const std::vector<Pyramid>& pyramids, const std::vector<Point2>& seeds,
                                            FrameRange window, const TrackingConfig& cfg, int threads = 1) {
  if (window.first < 0 || window.last >= static_cast<int>(pyramids.size()) || window.length() < 1) {
    throw config_error("tracking window outside the clip");
  }
  const int w = pyramids[window.first][0].width();
  const int h = pyramids[window.first][0].height();
  std::vector<Trajectory> out(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), threads, [&](int i) {
    Trajectory& tr = out[i];
    tr.seed = seeds[i];
    tr.window_start = window.first;
    tr.positions.assign(window.length(), seeds[i]);
    tr.alive.assign(window.length(), 0);
    Point2 p = seeds[i];
    bool alive = p.x >= 0 && p.y >= 0 && p.x <= w - 1 && p.y <= h - 1;
    tr.alive[0] = alive;
    for (int k = 1; k < window.length() && alive; ++k) {
      const Pyramid& a = pyramids[window.first + k - 1];
      const Pyramid& b = pyramids[window.first + k];
      const auto fwd = lk_detail::track_point(a, b, p, cfg);
      alive = fwd.ok && fwd.position.x >= 0 && fwd.position.y >= 0 && fwd.position.x <= w - 1 &&
              fwd.position.y <= h - 1;
      if (alive) {
        const auto bwd = lk_detail::track_point(b, a, fwd.position, cfg);
        alive = bwd.ok && std::hypot(bwd.position.x - p.x, bwd.position.y - p.y) <= cfg.fb_threshold;
      }
      if (alive) p = fwd.position;
      tr.positions[k] = p;
      tr.alive[k] = alive;
    }
    for (int k = 1; k < window.length(); ++k) {
      if (!tr.alive[k]) tr.positions[k] = tr.positions[k - 1];
    }
  });
  return out;
}

/// Convenience overload on a full volume (grayscale of its RGB frames).
inline std::vector<Trajectory> track_window(const FrameVolume& volume, const std::vector<Point2>& seeds,
                                            FrameRange window, const TrackingConfig& cfg, int threads = 1) {
  if (window.last >= volume.depth()) throw config_error("window longer than the clip");
  std::vector<ImageF> gray;
  for (int z = 0; z < volume.depth(); ++z) gray.push_back(to_gray(volume.rgb(z)));
  return track_window(tracking_pyramids(gray, cfg.pyramid_levels, threads), seeds, window, cfg, threads);
}

}  // namespace vseg
