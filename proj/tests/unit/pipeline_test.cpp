#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "vseg/vseg.hpp"

namespace vseg {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

// Frames as they come back from disk.
FrameVolume volume_of(const SyntheticClip& clip) {
  std::vector<ImageF> frames;
  for (const auto& f : clip.frames) frames.push_back(to_float_rgb(to_u8(f)));
  return FrameVolume::from_rgb(frames);
}

int count_files(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

std::vector<std::string> csv_column(const fs::path& file, int column) {
  std::ifstream in(file);
  std::string line;
  std::vector<std::string> out;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i <= column; ++i) std::getline(ss, cell, ',');
    out.push_back(cell);
  }
  return out;
}

TEST(Config, DefaultValues) {
  const PipelineConfig cfg;
  EXPECT_EQ(cfg.tracking.grid_interval, 10);
  EXPECT_EQ(cfg.tracking.window_length, 5);
  EXPECT_EQ(cfg.clip_size, 30);
  EXPECT_EQ(cfg.slic.n, 100);
  EXPECT_EQ(cfg.slic.depth, 5);
  EXPECT_EQ(cfg.slic.m, 22.0);
  EXPECT_EQ(cfg.slic.w_z, 50.0);
  EXPECT_EQ(cfg.slic.w_L, 1.0);
  EXPECT_EQ(cfg.slic.iterations, 5);
  EXPECT_EQ(cfg.grabcut.components, 5);
}

TEST(Config, DumpAndLoadRoundTrip) {
  PipelineConfig cfg;
  apply_override(cfg, "slic.m=10");
  apply_override(cfg, "tracking.lk_window = 9");
  apply_override(cfg, "bilateral.mode=on");
  apply_override(cfg, "grabcut.data_term=mixture");
  apply_override(cfg, "output.overlays=yes");
  apply_override(cfg, "ssc.lambda_rel=12.5");
  PipelineConfig back;
  apply_config_text(back, "# dumped\n\n" + dump_config(cfg));
  EXPECT_EQ(dump_config(back), dump_config(cfg));
  EXPECT_EQ(back.slic.m, 10.0);
  EXPECT_EQ(back.tracking.lk_window, 9);
  EXPECT_EQ(back.bilateral, BilateralMode::on);
  EXPECT_TRUE(back.write_overlays);
  EXPECT_EQ(get_config_value(back, "ssc.lambda_rel"), get_config_value(cfg, "ssc.lambda_rel"));
}

TEST(Config, EveryKeyRoundTrips) {
  const PipelineConfig defaults;
  for (const auto& key : config_keys()) {
    PipelineConfig cfg;
    set_config_value(cfg, key, get_config_value(defaults, key));
    EXPECT_EQ(dump_config(cfg), dump_config(defaults)) << key;
  }
}

TEST(Config, BadOverrides) {
  PipelineConfig cfg;
  EXPECT_THROW(apply_override(cfg, "slic.m"), config_error);
  EXPECT_THROW(apply_override(cfg, "slic.mm=3"), config_error);
  EXPECT_THROW(apply_override(cfg, "slic.m=abc"), config_error);
  EXPECT_THROW(apply_override(cfg, "slic.n=3.5"), config_error);
  EXPECT_THROW(apply_override(cfg, "output.overlays=maybe"), config_error);
  EXPECT_THROW(apply_override(cfg, "bilateral.mode=sometimes"), config_error);
  EXPECT_EQ(dump_config(cfg), dump_config(PipelineConfig{}));
}

TEST(Config, FileErrorsNameTheLine) {
  PipelineConfig cfg;
  try {
    apply_config_text(cfg, "slic.n = 50\n# fine\nslic.q = 1\n", "run.cfg");
    FAIL() << "expected config_error";
  } catch (const config_error& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config("/nonexistent/vseg.cfg"), config_error);
}

TEST(Config, ValidateRejectsOutOfRange) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.clip_size = 1;
  EXPECT_THROW(validate(cfg), config_error);
  cfg = {};
  cfg.motion.k = 1;
  EXPECT_THROW(validate(cfg), config_error);
}

TEST(Synthetic, TruthAreaPerFrame) {
  const auto clip = make_synthetic({});
  ASSERT_EQ(clip.frames.size(), 30u);
  ASSERT_EQ(clip.truth.size(), 30u);
  for (const auto& m : clip.truth.frames) {
    EXPECT_EQ(m.width(), 100);
    EXPECT_EQ(std::count_if(m.data().begin(), m.data().end(), [](std::uint8_t v) { return v != 0; }), 400);
  }
}

TEST(Synthetic, Deterministic) {
  const auto a = make_synthetic({});
  const auto b = make_synthetic({});
  for (std::size_t t = 0; t < a.frames.size(); ++t) EXPECT_TRUE(a.frames[t] == b.frames[t]);
}

TEST(Synthetic, ObjectLeavingTheFrameIsAnError) {
  SceneSpec spec;
  spec.speed_x = 3;  // travels 87 px: 20 + 87 > 100
  EXPECT_THROW(make_synthetic(spec), config_error);
  spec.speed_x = 2;
  spec.start_x = 30;
  EXPECT_THROW(make_synthetic(spec), config_error);
}

TEST(Synthetic, FlatBackgroundLosesMorePoints) {
  auto lost = [](bool textured) {
    SceneSpec spec;
    spec.frames = 6;
    spec.textured_background = textured;
    const auto vol = volume_of(make_synthetic(spec));
    const auto tracks = track_window(vol, seed_grid(100, 100, 10), {0, 5}, TrackingConfig{});
    return std::count_if(tracks.begin(), tracks.end(), [](const Trajectory& t) { return !t.alive_throughout(); });
  };
  EXPECT_GT(lost(false), lost(true));
}

TEST(Synthetic, StaticObjectGivesNoMotionSplit) {
  SceneSpec spec;
  spec.speed_x = 0;
  const auto clip = make_synthetic(spec);
  const auto out = process_clip(volume_of(clip), PipelineConfig{}, Stage::track, 1, {0, 29});
  for (const auto& w : out.windows) {
    ASSERT_TRUE(w.motion.has_value()) << w.warning;
    // Nothing moves, so whatever the clustering calls foreground is not the object.
    int on_object = 0;
    for (int j = 0; j < w.motion->matrix.columns(); ++j) {
      const Trajectory& t = w.trajectories[w.motion->matrix.ids[j]];
      if (w.motion->labels.is_foreground(j)) on_object += clip.truth.frames[0](int(t.seed.x), int(t.seed.y)) != 0;
    }
    EXPECT_EQ(on_object, 0);
  }
}

TEST(Synthetic, WrittenFilesReadBack) {
  TempDir dir("synth");
  SceneSpec spec;
  spec.frames = 4;
  const auto clip = make_synthetic(spec);
  write_synthetic(clip, dir.path());
  EXPECT_EQ(count_files(dir.path() / "frames"), 4);
  const MaskSequence truth = read_ground_truth(dir.path() / "truth");
  ASSERT_EQ(truth.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_TRUE(truth.frames[t] == clip.truth.frames[t]);
}

TEST(Pipeline, SmokeWritesMasksAndTimings) {
  TempDir dir("smoke");
  write_synthetic(make_synthetic({}), dir.path() / "seq");
  RunOptions opt;
  opt.input = dir.path() / "seq" / "frames";
  opt.output = dir.path() / "out";
  opt.truth = dir.path() / "seq" / "truth";
  opt.name = "square";
  std::ostringstream log;
  opt.log = &log;
  const auto rep = run_pipeline(opt, PipelineConfig{});
  EXPECT_EQ(rep.result.frames, 30);
  EXPECT_EQ(count_files(opt.output / "masks"), 30);
  EXPECT_EQ(csv_column(opt.output / "timings.csv", 0),
            (std::vector<std::string>{"preprocess", "track", "supervoxel", "coarse", "fine"}));
  for (const auto& s : csv_column(opt.output / "timings.csv", 1)) EXPECT_GE(std::stod(s), 0.0);
  ASSERT_TRUE(rep.report.has_value());
  EXPECT_EQ(rep.report->name, "square");
  EXPECT_EQ(rep.report->frames, 30);
  EXPECT_EQ(csv_column(opt.output / "report.csv", 0), (std::vector<std::string>{"square"}));
  EXPECT_NE(log.str().find("clip 0-29:"), std::string::npos);
  // The masks on disk are the masks that were scored.
  const MaskSequence written = read_ground_truth(opt.output / "masks");
  EXPECT_EQ(xor_error(written, rep.result.masks, "x").mean_error, 0.0);
}

TEST(Pipeline, ThreadCountDoesNotChangeOutput) {
  SceneSpec spec;
  spec.frames = 12;
  const auto vol = volume_of(make_synthetic(spec));
  PipelineConfig cfg;
  cfg.clip_size = 6;
  const auto a = run_video(vol, cfg, Stage::fine, 1);
  const auto b = run_video(vol, cfg, Stage::fine, 3);
  ASSERT_EQ(a.masks.size(), 12u);
  ASSERT_EQ(b.masks.size(), 12u);
  for (std::size_t t = 0; t < a.masks.size(); ++t) {
    EXPECT_TRUE(a.masks.frames[t] == b.masks.frames[t]) << t;
    EXPECT_TRUE(a.trimap.frames[t] == b.trimap.frames[t]) << t;
  }
  EXPECT_EQ(a.warnings, b.warnings);
}

TEST(Pipeline, TrimapForegroundMatchesObjectArea) {
  // LK window smaller than the 20-px square, so every object seed tracks from inside it.
  PipelineConfig cfg;
  apply_override(cfg, "tracking.lk_window=5");
  const auto r = run_video(volume_of(make_synthetic({})), cfg, Stage::coarse, 1);
  const double truth = 400.0 / 10000.0;
  EXPECT_NEAR(trimap_stats(r.trimap).foreground, truth, 0.5 * truth);
}

double boundary_per_label(const LabelVolume& lv) {
  long long edges = 0;
  for (int z = 0; z < lv.depth; ++z) {
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) {
        const int l = lv.at(x, y, z);
        edges += (x + 1 < lv.width && lv.at(x + 1, y, z) != l) + (y + 1 < lv.height && lv.at(x, y + 1, z) != l);
      }
    }
  }
  return static_cast<double>(edges) / lv.num_labels();
}

TEST(Pipeline, LowerRegularityLengthensBoundaries) {
  const auto vol = volume_of(make_synthetic({}));
  auto run = [&](const std::string& m) {
    PipelineConfig cfg;
    apply_override(cfg, "slic.m=" + m);
    return boundary_per_label(*process_clip(vol, cfg, Stage::supervoxel, 1, {0, 29}).supervoxels);
  };
  EXPECT_GT(run("10"), run("22"));
}

TEST(Pipeline, SupervoxelStageWritesNoMasks) {
  TempDir dir("svstage");
  SceneSpec spec;
  spec.frames = 10;
  write_synthetic(make_synthetic(spec), dir.path() / "seq");
  RunOptions opt;
  opt.input = dir.path() / "seq" / "frames";
  opt.output = dir.path() / "out";
  opt.last = Stage::supervoxel;
  const auto rep = run_pipeline(opt, PipelineConfig{});
  EXPECT_TRUE(rep.result.masks.frames.empty());
  EXPECT_FALSE(fs::exists(opt.output / "masks"));
  EXPECT_EQ(count_files(opt.output / "supervoxels"), 10);
  EXPECT_EQ(csv_column(opt.output / "timings.csv", 0), (std::vector<std::string>{"preprocess", "supervoxel"}));
}

TEST(Pipeline, TrackStageWritesTracks) {
  TempDir dir("trackstage");
  SceneSpec spec;
  spec.frames = 6;
  write_synthetic(make_synthetic(spec), dir.path() / "seq");
  RunOptions opt;
  opt.input = dir.path() / "seq" / "frames";
  opt.output = dir.path() / "out";
  opt.last = Stage::track;
  run_pipeline(opt, PipelineConfig{});
  // One window of 6 frames, 100 seeds.
  EXPECT_EQ(csv_column(opt.output / "tracks.csv", 0).size(), 600u);
  EXPECT_FALSE(fs::exists(opt.output / "masks"));
}

TEST(Pipeline, DebugExports) {
  TempDir dir("debug");
  SceneSpec spec;
  spec.frames = 6;
  write_synthetic(make_synthetic(spec), dir.path() / "seq");
  RunOptions opt;
  opt.input = dir.path() / "seq" / "frames";
  opt.output = dir.path() / "out";
  opt.debug_dir = dir.path() / "debug";
  PipelineConfig cfg;
  apply_override(cfg, "grabcut.max_iterations=1");
  run_pipeline(opt, cfg);
  EXPECT_EQ(count_files(dir.path() / "debug" / "flow"), 6);  // one field per frame
  EXPECT_EQ(count_files(dir.path() / "debug" / "tracks"), 6);
  EXPECT_EQ(count_files(dir.path() / "debug" / "supervoxels"), 6);
  EXPECT_EQ(count_files(dir.path() / "debug" / "trimap"), 6);
  EXPECT_EQ(count_files(dir.path() / "debug" / "grabcut"), 6);
}

TEST(Pipeline, GivenTrimapMustCoverTheVideo) {
  SceneSpec spec;
  spec.frames = 6;
  const auto vol = volume_of(make_synthetic(spec));
  Trimap short_trimap;
  short_trimap.frames.assign(4, ImageU8(100, 100, 1, code(TrimapCode::undetermined)));
  EXPECT_THROW(run_video(6, [&](FrameRange r) { return vol.slice(r.first, r.last); }, PipelineConfig{}, Stage::fine, 1,
                         {}, short_trimap),
               dimension_error);
}

TEST(Pipeline, MissingInputIsADataError) {
  TempDir dir("missing");
  RunOptions opt;
  opt.input = dir.path() / "nothing";
  opt.output = dir.path() / "out";
  EXPECT_THROW(run_pipeline(opt, PipelineConfig{}), data_error);
}

}  // namespace
}  // namespace vseg
