#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/image.hpp"
#include "vseg/motion_cluster.hpp"
#include "vseg/parallel.hpp"
#include "vseg/supervoxel.hpp"
#include "vseg/tracker.hpp"

namespace vseg {

/// One observation of a motion-labeled point: position in clip frame `frame`.
struct LabeledPoint {
  double x = 0.0;
  double y = 0.0;
  int frame = 0;
  bool foreground = false;
};

/// Every position of every clustered trajectory, tagged with its cluster's fg/bg flag.
/// `frame_offset` converts window frame indices to clip-local ones.
inline std::vector<LabeledPoint> labeled_points(const std::vector<Trajectory>& trajectories, const WindowMotion& motion,
                                                int frame_offset = 0) {
  std::vector<LabeledPoint> out;
  for (int j = 0; j < motion.matrix.columns(); ++j) {
    const Trajectory& t = trajectories.at(motion.matrix.ids[j]);
    const bool fg = motion.labels.is_foreground(j);
    for (int k = 0; k < t.length(); ++k) {
      out.push_back({t.positions[k].x, t.positions[k].y, t.window_start + k - frame_offset, fg});
    }
  }
  return out;
}

/// Per-supervoxel point counts behind a trimap.
struct FusionCounts {
  std::vector<int> background;
  std::vector<int> foreground;
};

inline FusionCounts count_points(const LabelVolume& lv, const std::vector<LabeledPoint>& points) {
  FusionCounts c;
  c.background.assign(lv.num_labels(), 0);
  c.foreground.assign(lv.num_labels(), 0);
  for (const auto& p : points) {
    const long x = std::lround(p.x);
    const long y = std::lround(p.y);
    if (p.frame < 0 || p.frame >= lv.depth || x < 0 || y < 0 || x >= lv.width || y >= lv.height) {
      throw data_error("tracked point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") in frame " +
                       std::to_string(p.frame) + " lies outside the clip");
    }
    const int label = lv.at(static_cast<int>(x), static_cast<int>(y), p.frame);
    (p.foreground ? c.foreground : c.background)[label]++;
  }
  return c;
}

/// Code of a supervoxel from its point counts: only background points -> background, only
/// foreground points -> foreground, both or none -> undetermined.
inline TrimapCode fusion_code(int background_points, int foreground_points) {
  if (background_points > 0 && foreground_points == 0) return TrimapCode::background;
  if (foreground_points > 0 && background_points == 0) return TrimapCode::foreground;
  return TrimapCode::undetermined;
}

/// Paints every voxel with the code of its supervoxel. Points are attributed per frame: a
/// point observed in frame z counts for the supervoxel under its rounded position in z.
inline Trimap fuse(const LabelVolume& lv, const std::vector<LabeledPoint>& points, int threads = 1) {
  if (points.empty()) throw insufficient_data_error("no tracked points to fuse with the supervoxels");
  const FusionCounts counts = count_points(lv, points);
  std::vector<std::uint8_t> codes(lv.num_labels());
  for (int l = 0; l < lv.num_labels(); ++l) codes[l] = code(fusion_code(counts.background[l], counts.foreground[l]));
  Trimap out;
  out.frames.assign(lv.depth, ImageU8(lv.width, lv.height, 1));
  parallel_for(lv.depth, threads, [&](int z) {
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) out.frames[z](x, y) = codes[lv.at(x, y, z)];
    }
  });
  return out;
}

struct TrimapStats {
  double background = 0.0;
  double foreground = 0.0;
  double undetermined = 0.0;
};

inline TrimapStats trimap_stats(const Trimap& trimap) {
  std::array<long long, 3> n{};
  long long total = 0;
  for (const auto& f : trimap.frames) {
    for (std::uint8_t v : f.data()) {
      if (v > 2) throw data_error("trimap holds a value outside {0, 1, 2}");
      ++n[v];
      ++total;
    }
  }
  if (total == 0) return {};
  return {static_cast<double>(n[0]) / total, static_cast<double>(n[1]) / total, static_cast<double>(n[2]) / total};
}

}  // namespace vseg
