#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "vseg/coarse_fusion.hpp"
#include "vseg/config.hpp"
#include "vseg/debug_export.hpp"
#include "vseg/error.hpp"
#include "vseg/eval.hpp"
#include "vseg/fine_seg.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/media_io.hpp"
#include "vseg/motion_cluster.hpp"
#include "vseg/preprocess.hpp"
#include "vseg/supervoxel.hpp"
#include "vseg/tracker.hpp"

namespace vseg {

/// Last stage to run. Tracking and supervoxels are independent branches; coarse needs both.
enum class Stage { track, supervoxel, coarse, fine };

using StageSeconds = std::vector<std::pair<std::string, double>>;

/// Everything one clip produced. `range` is in video frame positions (0-based).
struct ClipOutput {
  FrameRange range;
  std::vector<FlowField> flow;
  std::vector<WindowTracks> windows;
  std::optional<LabelVolume> supervoxels;
  Trimap trimap;
  std::optional<ClipSegmentation> segmentation;
  std::vector<std::string> warnings;
  StageSeconds seconds;
};

namespace pipeline_detail {

inline void add_seconds(StageSeconds& acc, const std::string& stage, double s) {
  for (auto& [name, v] : acc) {
    if (name == stage) {
      v += s;
      return;
    }
  }
  acc.emplace_back(stage, s);
}

// Runs fn, timing it into `seconds` and prefixing any library error with the stage name.
template <typename Fn>
auto run_stage(const std::string& stage, double& seconds, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  struct Timer {
    std::chrono::steady_clock::time_point start;
    double& out;
    ~Timer() { out = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
  } timer{start, seconds};
  try {
    return fn();
  } catch (const config_error& e) {
    throw config_error(stage + ": " + e.what());
  } catch (const data_error& e) {
    throw data_error(stage + ": " + e.what());
  }
}

inline std::vector<WindowTracks> track_and_cluster(const std::vector<ImageF>& gray, const PipelineConfig& cfg,
                                                   int threads) {
  const int w = gray.front().width(), h = gray.front().height();
  const auto pyramids = tracking_pyramids(gray, cfg.tracking.pyramid_levels, threads);
  const auto seeds = seed_grid(w, h, cfg.tracking.grid_interval);
  std::vector<WindowTracks> out;
  for (const FrameRange& window : reacquire_schedule(static_cast<int>(gray.size()), cfg.tracking.window_length)) {
    WindowTracks wt;
    wt.window = window;
    wt.trajectories = track_window(pyramids, seeds, window, cfg.tracking, threads);
    try {
      wt.motion = cluster_motion(wt.trajectories, cfg.motion, threads);
      if (!wt.motion->codes.converged) {
        wt.warning = std::to_string(wt.motion->codes.unconverged_columns) + " sparse codes hit the iteration cap";
      }
    } catch (const data_error& e) {
      wt.warning = e.what();
    }
    out.push_back(std::move(wt));
  }
  return out;
}

inline Trimap all_undetermined(int w, int h, int depth) {
  Trimap t;
  t.frames.assign(depth, ImageU8(w, h, 1, code(TrimapCode::undetermined)));
  return t;
}

}  // namespace pipeline_detail

/// Runs the stages up to `last` on one clip: preprocessing, then tracking + motion clustering
/// alongside supervoxel generation, then trimap fusion, then GrabCut. With `given_trimap` and
/// last == fine, only GrabCut runs. `range` labels the output.
inline ClipOutput process_clip(const FrameVolume& clip, const PipelineConfig& cfg, Stage last, int threads,
                               FrameRange range, const std::optional<Trimap>& given_trimap = std::nullopt) {
  using namespace pipeline_detail;
  if (clip.depth() < 2) throw data_error("a clip needs at least 2 frames");
  ClipOutput out;
  out.range = range;
  const int w = clip.width(), h = clip.height();
  const bool need_track = !(given_trimap && last == Stage::fine) && last != Stage::supervoxel;
  const bool need_supervoxel = !(given_trimap && last == Stage::fine) && last != Stage::track;

  FrameVolume filtered;
  std::vector<ImageF> gray;
  if (need_track || need_supervoxel) {
    double s = 0.0;
    run_stage("preprocess", s, [&] {
      if (cfg.bilateral_active(w, h)) {
        std::vector<ImageF> frames(clip.depth());
        parallel_for(clip.depth(), threads, [&](int z) {
          frames[z] = bilateral_filter(clip.rgb(z), cfg.bilateral_params.sigma_spatial, cfg.bilateral_params.sigma_range);
        });
        filtered = FrameVolume::from_rgb(std::move(frames), clip.frame_rate());
      } else {
        filtered = clip;
      }
      gray.resize(filtered.depth());
      for (int z = 0; z < filtered.depth(); ++z) gray[z] = to_gray(filtered.rgb(z));
      if (need_supervoxel) out.flow = flow_sequence(gray, cfg.flow, threads);
    });
    add_seconds(out.seconds, "preprocess", s);
  }

  double track_s = 0.0, sv_s = 0.0;
  auto supervoxel_branch = [&] {
    SlicParams p = cfg.slic;
    return run_stage("supervoxel", sv_s, [&] { return supervoxelize(filtered, out.flow, p, threads); });
  };
  auto track_branch = [&] { return run_stage("track", track_s, [&] { return track_and_cluster(gray, cfg, threads); }); };
  if (need_track && need_supervoxel && threads > 1) {
    auto sv = std::async(std::launch::async, supervoxel_branch);
    std::exception_ptr track_failure;
    try {
      out.windows = track_branch();
    } catch (...) {
      track_failure = std::current_exception();
    }
    out.supervoxels = sv.get();
    if (track_failure) std::rethrow_exception(track_failure);
  } else {
    if (need_track) out.windows = track_branch();
    if (need_supervoxel) out.supervoxels = supervoxel_branch();
  }
  if (need_track) add_seconds(out.seconds, "track", track_s);
  if (need_supervoxel) add_seconds(out.seconds, "supervoxel", sv_s);
  for (const auto& wt : out.windows) {
    if (!wt.warning.empty()) {
      out.warnings.push_back("track: window " + std::to_string(range.first + wt.window.first) + "-" +
                             std::to_string(range.first + wt.window.last) + ": " + wt.warning);
    }
  }
  if (last == Stage::track || last == Stage::supervoxel) return out;

  if (given_trimap && last == Stage::fine) {
    out.trimap = *given_trimap;
  } else {
    double s = 0.0;
    out.trimap = run_stage("coarse", s, [&] {
      std::vector<LabeledPoint> points;
      for (const auto& wt : out.windows) {
        if (!wt.motion) continue;
        const auto p = labeled_points(wt.trajectories, *wt.motion);
        points.insert(points.end(), p.begin(), p.end());
      }
      if (points.empty()) {
        out.warnings.push_back("coarse: frames " + std::to_string(range.first) + "-" + std::to_string(range.last) +
                               ": no motion-labeled points; trimap left undetermined");
        return all_undetermined(w, h, clip.depth());
      }
      return fuse(*out.supervoxels, points, threads);
    });
    add_seconds(out.seconds, "coarse", s);
  }
  if (last == Stage::coarse) return out;

  double s = 0.0;
  out.segmentation = run_stage("fine", s, [&] { return segment_clip(clip, out.trimap, cfg.grabcut, threads); });
  add_seconds(out.seconds, "fine", s);
  for (const auto& wmsg : out.segmentation->warnings) out.warnings.push_back("fine: " + wmsg);
  return out;
}

/// Video-level result: masks and trimaps concatenated over clips, stage seconds summed.
struct RunResult {
  int frames = 0;
  MaskSequence masks;
  Trimap trimap;
  StageSeconds seconds;
  std::vector<std::string> warnings;
};

using ClipLoader = std::function<FrameVolume(FrameRange)>;
using ClipHook = std::function<void(const FrameVolume&, const ClipOutput&)>;

/// Splits `total_frames` into clips, loads each with `load` and processes it. `on_clip` sees
/// every clip's full output as soon as it is done, so partial results survive a later failure.
inline RunResult run_video(int total_frames, const ClipLoader& load, const PipelineConfig& cfg, Stage last,
                           int threads = 1, const ClipHook& on_clip = {},
                           const std::optional<Trimap>& given_trimap = std::nullopt) {
  validate(cfg);
  if (threads < 1) throw config_error("thread count must be at least 1");
  if (given_trimap && static_cast<int>(given_trimap->size()) != total_frames) {
    throw dimension_error("trimap has " + std::to_string(given_trimap->size()) + " frames, video has " +
                          std::to_string(total_frames));
  }
  RunResult result;
  result.frames = total_frames;
  for (const FrameRange& r : split_into_clips(total_frames, cfg.clip_size)) {
    const FrameVolume clip = load(r);
    std::optional<Trimap> slice;
    if (given_trimap) {
      slice.emplace();
      slice->frames.assign(given_trimap->frames.begin() + r.first, given_trimap->frames.begin() + r.last + 1);
    }
    const ClipOutput out = process_clip(clip, cfg, last, threads, r, slice);
    if (on_clip) on_clip(clip, out);
    for (const auto& [stage, s] : out.seconds) pipeline_detail::add_seconds(result.seconds, stage, s);
    result.warnings.insert(result.warnings.end(), out.warnings.begin(), out.warnings.end());
    result.trimap.frames.insert(result.trimap.frames.end(), out.trimap.frames.begin(), out.trimap.frames.end());
    if (out.segmentation) {
      const auto& m = out.segmentation->masks.frames;
      result.masks.frames.insert(result.masks.frames.end(), m.begin(), m.end());
    }
  }
  return result;
}

/// In-memory convenience: the whole video is one FrameVolume.
inline RunResult run_video(const FrameVolume& video, const PipelineConfig& cfg, Stage last = Stage::fine,
                           int threads = 1, const ClipHook& on_clip = {}) {
  return run_video(video.depth(), [&](FrameRange r) { return video.slice(r.first, r.last); }, cfg, last, threads,
                   on_clip);
}

/// Where a file-based run reads and writes.
struct RunOptions {
  std::filesystem::path input;
  std::filesystem::path output;  // masks/, overlays/, trimap/, supervoxels/, tracks.csv, timings.csv
  std::optional<std::filesystem::path> truth;
  std::optional<std::filesystem::path> debug_dir;
  std::optional<std::filesystem::path> trimap;  // fine stage: use these trimaps instead of computing them
  std::string name;                            // sequence name in the report; defaults to the input folder
  Stage last = Stage::fine;
  int threads = 1;
  std::ostream* log = nullptr;  // per-clip progress and warnings
};

struct PipelineReport {
  RunResult result;
  std::optional<SequenceReport> report;  // when truth was given
};

namespace pipeline_detail {

inline void write_tracks_csv(std::ostream& os, const ClipOutput& out) {
  for (std::size_t w = 0; w < out.windows.size(); ++w) {
    const WindowTracks& wt = out.windows[w];
    std::vector<int> column(wt.trajectories.size(), -1);
    if (wt.motion) {
      for (int j = 0; j < wt.motion->matrix.columns(); ++j) column[wt.motion->matrix.ids[j]] = j;
    }
    for (std::size_t i = 0; i < wt.trajectories.size(); ++i) {
      const Trajectory& t = wt.trajectories[i];
      for (int k = 0; k < t.length(); ++k) {
        os << out.range.first + wt.window.first << ',' << i << ',' << out.range.first + t.window_start + k << ','
           << t.positions[k].x << ',' << t.positions[k].y << ',' << int(t.alive[k]) << ',';
        if (column[i] < 0) {
          os << ",\n";
        } else {
          os << wt.motion->labels.cluster[column[i]] << ',' << int(wt.motion->labels.is_foreground(column[i])) << '\n';
        }
      }
    }
  }
}

}  // namespace pipeline_detail

/// File-based pipeline: loads frames from `opt.input` clip by clip, writes each stage's
/// products under `opt.output` and debug images under `opt.debug_dir`, and scores the masks
/// against `opt.truth` when given (report.csv).
inline PipelineReport run_pipeline(const RunOptions& opt, const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  std::optional<FramePattern> pattern;
  if (!cfg.frame_pattern.empty()) pattern = FramePattern::parse(cfg.frame_pattern);
  const auto family = io_detail::indexed_family(opt.input, pattern);
  const int first_index = family.begin()->first;
  const int total = family.rbegin()->first - first_index + 1;
  std::optional<Trimap> given;
  if (opt.trimap) given = read_trimap(*opt.trimap);

  std::error_code ec;
  fs::create_directories(opt.output, ec);
  if (ec) throw io_error("cannot create " + opt.output.string() + ": " + ec.message());
  std::ofstream tracks_csv;
  if (opt.last == Stage::track) {
    tracks_csv.open(opt.output / "tracks.csv");
    if (!tracks_csv) throw io_error("cannot write " + (opt.output / "tracks.csv").string());
    tracks_csv << "window_start,point,frame,x,y,alive,cluster,foreground\n";
  }

  auto load = [&](FrameRange r) {
    return load_clip(opt.input, pattern, FrameRange{first_index + r.first, first_index + r.last}, cfg.slic.frame_rate);
  };
  auto on_clip = [&](const FrameVolume& clip, const ClipOutput& out) {
    const int index = first_index + out.range.first;
    if (out.segmentation) {
      write_mask(out.segmentation->masks, opt.output / "masks", index);
      if (cfg.write_overlays) write_overlay(clip, out.segmentation->masks, opt.output / "overlays", index);
    }
    if (opt.last == Stage::coarse) write_trimap(out.trimap, opt.output / "trimap", index);
    if (opt.last == Stage::supervoxel) export_supervoxels(opt.output / "supervoxels", clip, *out.supervoxels, index);
    if (opt.last == Stage::track) pipeline_detail::write_tracks_csv(tracks_csv, out);
    if (opt.debug_dir) {
      const fs::path& d = *opt.debug_dir;
      if (cfg.debug_flow && !out.flow.empty()) export_flow(d / "flow", out.flow, index);
      if (cfg.debug_tracks && !out.windows.empty()) export_tracks(d / "tracks", clip, out.windows, index);
      if (cfg.debug_supervoxels && out.supervoxels) export_supervoxels(d / "supervoxels", clip, *out.supervoxels, index);
      if (cfg.debug_trimap && !out.trimap.frames.empty()) write_trimap(out.trimap, d / "trimap", index);
      if (cfg.debug_grabcut && out.segmentation) {
        for (std::size_t z = 0; z < out.segmentation->frames.size(); ++z) {
          export_grabcut(d / "grabcut", out.trimap.frames[z], out.segmentation->frames[z], index + static_cast<int>(z));
        }
      }
    }
    if (opt.log) {
      *opt.log << "clip " << index << "-" << first_index + out.range.last << ":";
      for (const auto& [stage, s] : out.seconds) *opt.log << ' ' << stage << '=' << s << 's';
      *opt.log << '\n';
      for (const auto& w : out.warnings) *opt.log << "warning: " << w << '\n';
    }
  };

  PipelineReport rep;
  rep.result = run_video(total, load, cfg, opt.last, opt.threads, on_clip, given);

  std::ofstream timings(opt.output / "timings.csv");
  timings << "stage,seconds,seconds_per_frame\n";
  for (const auto& [stage, s] : rep.result.seconds) timings << stage << ',' << s << ',' << s / total << '\n';

  if (opt.truth && opt.last == Stage::fine) {
    const MaskSequence truth = read_ground_truth(*opt.truth);
    fs::path dir = fs::absolute(opt.input).lexically_normal();
    if (dir.filename().empty()) dir = dir.parent_path();
    const std::string name = opt.name.empty() ? dir.filename().string() : opt.name;
    rep.report = xor_error(rep.result.masks, truth, name);
    rep.report->stage_seconds = rep.result.seconds;
    std::ofstream csv(opt.output / "report.csv");
    csv << report_csv({*rep.report});
  }
  return rep;
}

}  // namespace vseg
