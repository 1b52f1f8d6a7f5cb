#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <tuple>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/image.hpp"
#include "vseg/image_file.hpp"

namespace vseg {

/// Inclusive frame index range.
struct FrameRange {
  int first = 0;
  int last = 0;

  int length() const { return last - first + 1; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

/// Frame file naming rule: `<stem><zero-padded index>.<ext>`. A `digits` of 0 accepts any
/// padding width.
struct FramePattern {
  std::string stem;
  int digits = 0;
  std::string ext = "png";

  /// Parses printf-style patterns such as "frame_%05d.png".
  static FramePattern parse(const std::string& pattern) {
    static const std::regex re(R"(^(.*)%0?(\d*)d\.(\w+)$)");
    std::smatch m;
    if (!std::regex_match(pattern, m, re)) throw config_error("bad frame pattern: " + pattern);
    FramePattern p;
    p.stem = m[1];
    p.digits = m[2].length() ? std::stoi(m[2]) : 0;
    p.ext = m[3];
    return p;
  }
};

namespace io_detail {

struct IndexedFile {
  std::string stem;
  std::string ext;
  int digits;
  int index;
  std::filesystem::path path;
};

inline std::vector<IndexedFile> scan_indexed(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw io_error("not a directory: " + dir.string());
  static const std::regex re(R"(^(.*?)(\d+)\.(\w+)$)");
  std::vector<IndexedFile> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, re)) continue;
    files.push_back({m[1], m[3], static_cast<int>(m[2].length()), std::stoi(m[2]), entry.path()});
  }
  std::sort(files.begin(), files.end(), [](const IndexedFile& a, const IndexedFile& b) {
    return std::tie(a.stem, a.ext, a.index) < std::tie(b.stem, b.ext, b.index);
  });
  return files;
}

// Index -> path for the files matching `pattern`, or for the most populous (stem, ext)
// family when no pattern is given.
inline std::map<int, std::filesystem::path> indexed_family(const std::filesystem::path& dir,
                                                          const std::optional<FramePattern>& pattern) {
  const auto files = scan_indexed(dir);
  std::map<std::pair<std::string, std::string>, std::map<int, std::filesystem::path>> families;
  for (const auto& f : files) {
    if (pattern) {
      if (f.stem != pattern->stem || f.ext != pattern->ext) continue;
      if (pattern->digits && f.digits != pattern->digits) continue;
    }
    families[{f.stem, f.ext}].emplace(f.index, f.path);
  }
  const std::map<int, std::filesystem::path>* best = nullptr;
  for (const auto& [key, family] : families) {
    if (!best || family.size() > best->size()) best = &family;
  }
  if (!best) throw io_error("no indexed image files in " + dir.string());
  return *best;
}

}  // namespace io_detail

/// Loads frames `range` (default: every indexed frame present) in index order.
inline FrameVolume load_clip(const std::filesystem::path& dir,
                             const std::optional<FramePattern>& pattern = std::nullopt,
                             std::optional<FrameRange> range = std::nullopt, double frame_rate = 30.0) {
  const auto family = io_detail::indexed_family(dir, pattern);
  if (!range) range = FrameRange{family.begin()->first, family.rbegin()->first};
  if (range->length() < 2) throw data_error("a clip needs at least 2 frames");
  std::vector<ImageF> frames;
  frames.reserve(range->length());
  for (int i = range->first; i <= range->last; ++i) {
    const auto it = family.find(i);
    if (it == family.end()) throw gap_error(i);
    frames.push_back(to_float_rgb(read_image(it->second)));
    if (!frames.back().same_shape(frames.front())) {
      throw dimension_error("frame " + std::to_string(i) + " has mismatched dimensions");
    }
  }
  return FrameVolume::from_rgb(std::move(frames), frame_rate);
}

/// Contiguous clips of `clip_size` frames; a trailing remainder of one frame joins the
/// previous clip.
inline std::vector<FrameRange> split_into_clips(int total_frames, int clip_size) {
  if (clip_size < 2) throw config_error("clip size must be at least 2");
  if (total_frames < 2) throw data_error("video needs at least 2 frames");
  std::vector<FrameRange> clips;
  for (int start = 0; start < total_frames; start += clip_size) {
    clips.push_back({start, std::min(start + clip_size, total_frames) - 1});
  }
  if (clips.size() > 1 && clips.back().length() < 2) {
    clips.pop_back();
    clips.back().last = total_frames - 1;
  }
  return clips;
}

inline std::string indexed_name(const std::string& stem, int index, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05d", index);
  return stem + buf + "." + ext;
}

/// Writes `mask_%05d.png` files (foreground 255, background 0), numbered from `first_index`.
inline void write_mask(const MaskSequence& mask, const std::filesystem::path& dir, int first_index = 0) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const ImageU8& m = mask.frames[i];
    ImageU8 out(m.width(), m.height(), 1);
    for (std::size_t p = 0; p < m.data().size(); ++p) out.data()[p] = m.data()[p] ? 255 : 0;
    write_image(dir / indexed_name("mask_", first_index + static_cast<int>(i), "png"), out);
  }
}

/// Reads every indexed image in `dir` in index order; any nonzero value is foreground.
inline MaskSequence read_ground_truth(const std::filesystem::path& dir) {
  const auto family = io_detail::indexed_family(dir, std::nullopt);
  MaskSequence seq;
  for (const auto& [index, path] : family) {
    const ImageU8 img = read_image(path);
    ImageU8 m(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        bool on = false;
        for (int c = 0; c < img.channels(); ++c) on = on || img(x, y, c) != 0;
        m(x, y) = on ? 1 : 0;
      }
    }
    seq.frames.push_back(std::move(m));
  }
  return seq;
}

/// Debug export: background 0, undetermined 128, foreground 255.
inline void write_trimap(const Trimap& trimap, const std::filesystem::path& dir, int first_index = 0) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (std::size_t i = 0; i < trimap.size(); ++i) {
    const ImageU8& t = trimap.frames[i];
    ImageU8 out(t.width(), t.height(), 1);
    for (std::size_t p = 0; p < t.data().size(); ++p) {
      const auto c = static_cast<TrimapCode>(t.data()[p]);
      out.data()[p] = c == TrimapCode::background ? 0 : c == TrimapCode::foreground ? 255 : 128;
    }
    write_image(dir / indexed_name("trimap_", first_index + static_cast<int>(i), "png"), out);
  }
}

/// Inverse of write_trimap: values below 64 are background, above 191 foreground.
inline Trimap read_trimap(const std::filesystem::path& dir) {
  const auto family = io_detail::indexed_family(dir, std::nullopt);
  Trimap trimap;
  for (const auto& [index, path] : family) {
    const ImageU8 img = read_image(path);
    ImageU8 t(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const int v = img(x, y, 0);
        t(x, y) = code(v < 64 ? TrimapCode::background
                              : v > 191 ? TrimapCode::foreground : TrimapCode::undetermined);
      }
    }
    trimap.frames.push_back(std::move(t));
  }
  return trimap;
}

/// Source frames with foreground pixels tinted red and background dimmed.
inline void write_overlay(const FrameVolume& volume, const MaskSequence& mask,
                          const std::filesystem::path& dir, int first_index = 0) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const int n = std::min(volume.depth(), static_cast<int>(mask.size()));
  for (int z = 0; z < n; ++z) {
    const ImageF& rgb = volume.rgb(z);
    ImageF tinted(rgb.width(), rgb.height(), 3);
    for (int y = 0; y < rgb.height(); ++y) {
      for (int x = 0; x < rgb.width(); ++x) {
        const bool fg = mask.frames[z](x, y) != 0;
        for (int c = 0; c < 3; ++c) {
          const float v = rgb(x, y, c);
          tinted(x, y, c) = fg ? 0.5f * v + (c == 0 ? 0.5f : 0.0f) : 0.6f * v;
        }
      }
    }
    write_image(dir / indexed_name("overlay_", first_index + z, "png"), to_u8(tinted));
  }
}

}  // namespace vseg
