#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vseg/fine_seg.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/image_file.hpp"
#include "vseg/media_io.hpp"
#include "vseg/motion_cluster.hpp"
#include "vseg/preprocess.hpp"
#include "vseg/supervoxel.hpp"
#include "vseg/tracker.hpp"

namespace vseg {

/// Tracking and clustering output of one window. `motion` is empty when clustering was not
/// possible; `warning` says why.
struct WindowTracks {
  FrameRange window;
  std::vector<Trajectory> trajectories;
  std::optional<WindowMotion> motion;
  std::string warning;
};

namespace debug_detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create " + dir.string() + ": " + ec.message());
}

inline void fill_square(ImageF& img, double cx, double cy, int radius, const float (&rgb)[3]) {
  const int x0 = static_cast<int>(std::lround(cx)), y0 = static_cast<int>(std::lround(cy));
  for (int y = y0 - radius; y <= y0 + radius; ++y) {
    for (int x = x0 - radius; x <= x0 + radius; ++x) {
      if (!img.contains(x, y)) continue;
      for (int c = 0; c < 3; ++c) img(x, y, c) = rgb[c];
    }
  }
}

}  // namespace debug_detail

/// Color-wheel images of each frame's flow: `flow_%05d.png`.
inline void export_flow(const std::filesystem::path& dir, const std::vector<FlowField>& flow, int first_index) {
  debug_detail::ensure_dir(dir);
  for (std::size_t z = 0; z < flow.size(); ++z) {
    write_image(dir / indexed_name("flow_", first_index + static_cast<int>(z), "png"), to_u8(flow_to_color(flow[z])));
  }
}

/// Frames with the tracked points drawn (`tracks_%05d.png`). Clustered points are red
/// (foreground) or yellow (background); points that were not clustered are green. A frame
/// shared by two windows shows the later window's points.
inline void export_tracks(const std::filesystem::path& dir, const FrameVolume& volume,
                          const std::vector<WindowTracks>& windows, int first_index) {
  debug_detail::ensure_dir(dir);
  static constexpr float kFg[3] = {1.0f, 0.1f, 0.1f};
  static constexpr float kBg[3] = {1.0f, 0.9f, 0.1f};
  static constexpr float kLoose[3] = {0.1f, 0.9f, 0.2f};
  for (int z = 0; z < volume.depth(); ++z) {
    ImageF img = volume.rgb(z);
    const WindowTracks* owner = nullptr;
    for (const auto& w : windows) {
      if (z >= w.window.first && z <= w.window.last) owner = &w;
    }
    if (owner) {
      std::vector<int> column(owner->trajectories.size(), -1);
      if (owner->motion) {
        for (int j = 0; j < owner->motion->matrix.columns(); ++j) column[owner->motion->matrix.ids[j]] = j;
      }
      for (std::size_t i = 0; i < owner->trajectories.size(); ++i) {
        const Trajectory& t = owner->trajectories[i];
        const int k = z - t.window_start;
        if (k < 0 || k >= t.length() || !t.alive[k]) continue;
        const auto& color = column[i] < 0 ? kLoose : owner->motion->labels.is_foreground(column[i]) ? kFg : kBg;
        debug_detail::fill_square(img, t.positions[k].x, t.positions[k].y, 1, color);
      }
    }
    write_image(dir / indexed_name("tracks_", first_index + z, "png"), to_u8(img));
  }
}

/// Frames with supervoxel boundaries drawn in yellow: `supervoxels_%05d.png`.
inline void export_supervoxels(const std::filesystem::path& dir, const FrameVolume& volume, const LabelVolume& lv,
                               int first_index) {
  debug_detail::ensure_dir(dir);
  for (int z = 0; z < lv.depth; ++z) {
    ImageF img = volume.rgb(z);
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) {
        const int l = lv.at(x, y, z);
        const bool edge = (x + 1 < lv.width && lv.at(x + 1, y, z) != l) || (y + 1 < lv.height && lv.at(x, y + 1, z) != l);
        if (!edge) continue;
        img(x, y, 0) = 1.0f;
        img(x, y, 1) = 0.9f;
        img(x, y, 2) = 0.0f;
      }
    }
    write_image(dir / indexed_name("supervoxels_", first_index + z, "png"), to_u8(img));
  }
}

/// One image per GrabCut iteration, `grabcut_%05d_iter%d.png`: fixed background 0, fixed
/// foreground 255, undetermined pixels 192 when the cut made them foreground and 64 otherwise.
inline void export_grabcut(const std::filesystem::path& dir, const ImageU8& trimap, const GrabCutResult& result,
                           int frame_index) {
  debug_detail::ensure_dir(dir);
  for (std::size_t it = 0; it < result.intermediate.size(); ++it) {
    const ImageU8& cut = result.intermediate[it];
    ImageU8 out(cut.width(), cut.height(), 1);
    for (std::size_t i = 0; i < cut.data().size(); ++i) {
      const auto t = static_cast<TrimapCode>(trimap.data()[i]);
      out.data()[i] = t == TrimapCode::background   ? 0
                      : t == TrimapCode::foreground ? 255
                      : cut.data()[i]               ? 192
                                                    : 64;
    }
    char name[64];
    std::snprintf(name, sizeof name, "grabcut_%05d_iter%zu.png", frame_index, it + 1);
    write_image(dir / name, out);
  }
}

}  // namespace vseg
