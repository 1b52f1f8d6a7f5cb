#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vseg/media_io.hpp"

namespace vseg {
namespace {

using testing::TempDir;

void write_frames(const std::filesystem::path& dir, int count, int w, int h, const std::vector<int>& skip = {}) {
  for (int i = 0; i < count; ++i) {
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    ImageU8 img(w, h, 3);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        img(x, y, 0) = static_cast<std::uint8_t>(x + i);
        img(x, y, 1) = static_cast<std::uint8_t>(y);
        img(x, y, 2) = 128;
      }
    }
    write_image(dir / indexed_name("frame_", i, "png"), img);
  }
}

TEST(LoadClip, LoadsThirtyFrameClip) {
  TempDir dir("clip30");
  write_frames(dir.path(), 30, 352, 288);
  const FrameVolume v = load_clip(dir.path(), FramePattern::parse("frame_%05d.png"));
  EXPECT_EQ(v.depth(), 30);
  EXPECT_EQ(v.width(), 352);
  EXPECT_EQ(v.height(), 288);
  EXPECT_NEAR(v.rgb(3)(10, 20, 0), (10 + 3) / 255.0, 1e-6);
  EXPECT_NEAR(v.rgb(0)(0, 0, 2), 128 / 255.0, 1e-6);
  const Vec3 lab = rgb_to_lab({v.rgb(5)(7, 9, 0), v.rgb(5)(7, 9, 1), v.rgb(5)(7, 9, 2)});
  EXPECT_NEAR(v.lab(5)(7, 9, 0), lab[0], 1e-4);
}

TEST(LoadClip, SingleFrameIsAnError) {
  TempDir dir("clip1");
  write_frames(dir.path(), 1, 16, 16);
  EXPECT_THROW(load_clip(dir.path()), data_error);
}

TEST(LoadClip, GapNamesMissingIndex) {
  TempDir dir("gap");
  write_frames(dir.path(), 5, 16, 16, {2});
  try {
    load_clip(dir.path(), std::nullopt, FrameRange{0, 4});
    FAIL() << "expected gap_error";
  } catch (const gap_error& e) {
    EXPECT_EQ(e.missing_index, 2);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(LoadClip, MixedDimensionsRejected) {
  TempDir dir("mixed");
  write_frames(dir.path(), 2, 16, 16);
  write_image(dir.path() / indexed_name("frame_", 2, "png"), ImageU8(20, 16, 3));
  EXPECT_THROW(load_clip(dir.path()), dimension_error);
}

TEST(LoadClip, ReadsPpmFrames) {
  TempDir dir("ppm");
  for (int i = 0; i < 3; ++i) write_image(dir.path() / indexed_name("f", i, "ppm"), ImageU8(8, 6, 3, 200));
  const FrameVolume v = load_clip(dir.path());
  EXPECT_EQ(v.depth(), 3);
  EXPECT_NEAR(v.rgb(2)(7, 5, 1), 200 / 255.0, 1e-6);
}

TEST(SplitIntoClips, DefaultClipSize) {
  const auto clips = split_into_clips(90, 30);
  ASSERT_EQ(clips.size(), 3u);
  EXPECT_EQ(clips[0], (FrameRange{0, 29}));
  EXPECT_EQ(clips[1], (FrameRange{30, 59}));
  EXPECT_EQ(clips[2], (FrameRange{60, 89}));
}

TEST(SplitIntoClips, SingleFrameRemainderMerges) {
  const auto clips = split_into_clips(31, 30);
  ASSERT_EQ(clips.size(), 1u);
  EXPECT_EQ(clips[0], (FrameRange{0, 30}));
}

TEST(SplitIntoClips, ArithmeticOracle) {
  // ceil(60 / 7) = 9 ranges: eight of 7 frames (56) then a remainder of 4.
  const auto clips = split_into_clips(60, 7);
  ASSERT_EQ(clips.size(), 9u);
  EXPECT_EQ(clips.back().length(), 4);
}

TEST(SplitIntoClips, Errors) {
  EXPECT_THROW(split_into_clips(1, 30), data_error);
  EXPECT_THROW(split_into_clips(10, 1), config_error);
}

TEST(SplitIntoClips, PartitionsEveryLength) {
  for (int total = 2; total < 80; ++total) {
    for (int size = 2; size < 12; ++size) {
      const auto clips = split_into_clips(total, size);
      int expected = 0;
      for (const auto& c : clips) {
        EXPECT_EQ(c.first, expected);
        EXPECT_GE(c.length(), 2);
        expected = c.last + 1;
      }
      EXPECT_EQ(expected, total);
    }
  }
}

MaskSequence random_mask(int w, int h, int frames, unsigned seed) {
  std::mt19937 rng(seed);
  MaskSequence m;
  for (int f = 0; f < frames; ++f) {
    ImageU8 img(w, h, 1);
    for (auto& v : img.data()) v = rng() & 1;
    m.frames.push_back(img);
  }
  return m;
}

TEST(WriteMask, ConstantFrames) {
  TempDir dir("maskconst");
  MaskSequence m;
  m.frames.push_back(ImageU8(12, 9, 1, 0));
  m.frames.push_back(ImageU8(12, 9, 1, 1));
  write_mask(m, dir.path());
  const ImageU8 bg = read_image(dir.path() / "mask_00000.png");
  const ImageU8 fg = read_image(dir.path() / "mask_00001.png");
  EXPECT_EQ(bg.channels(), 1);
  for (auto v : bg.data()) EXPECT_EQ(v, 0);
  for (auto v : fg.data()) EXPECT_EQ(v, 255);
}

TEST(WriteMask, RoundTripIsIdentity) {
  TempDir dir("maskrt");
  const MaskSequence m = random_mask(17, 11, 4, 5);
  write_mask(m, dir.path());
  EXPECT_EQ(read_ground_truth(dir.path()), m);
}

TEST(ReadGroundTruth, NonzeroIsForeground) {
  TempDir dir("gt");
  ImageU8 img(3, 1, 1);
  img(0, 0) = 0;
  img(1, 0) = 37;
  img(2, 0) = 255;
  write_image(dir.path() / "gt_00000.png", img);
  write_image(dir.path() / "gt_00001.png", ImageU8(3, 1, 1, 255));
  const MaskSequence m = read_ground_truth(dir.path());
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.frames[0](0, 0), 0);
  EXPECT_EQ(m.frames[0](1, 0), 1);
  EXPECT_EQ(m.frames[0](2, 0), 1);
}

TEST(ReadGroundTruth, SegTrackStyleFolderHasOneMaskPerFrame) {
  // SegTrack keeps frames and masks as parallel indexed image lists.
  TempDir dir("segtrack");
  const auto frames = dir.path() / "parachute";
  const auto truth = frames / "ground-truth";
  std::filesystem::create_directories(truth);
  write_frames(frames, 6, 20, 10);
  for (int i = 0; i < 6; ++i) write_image(truth / indexed_name("parachute_", i, "png"), ImageU8(20, 10, 1, i % 2 ? 255 : 0));
  const FrameVolume v = load_clip(frames);
  EXPECT_EQ(read_ground_truth(truth).size(), static_cast<std::size_t>(v.depth()));
}

TEST(Trimap, ExportUsesThreeGrayLevelsAndReadsBack) {
  TempDir dir("trimap");
  Trimap t;
  ImageU8 f(3, 1, 1);
  f(0, 0) = code(TrimapCode::background);
  f(1, 0) = code(TrimapCode::foreground);
  f(2, 0) = code(TrimapCode::undetermined);
  t.frames.push_back(f);
  write_trimap(t, dir.path());
  const ImageU8 img = read_image(dir.path() / "trimap_00000.png");
  EXPECT_EQ(img(0, 0), 0);
  EXPECT_EQ(img(1, 0), 255);
  EXPECT_EQ(img(2, 0), 128);
  EXPECT_EQ(read_trimap(dir.path()), t);
}

TEST(Overlay, WritesOneImagePerFrame) {
  TempDir dir("overlay");
  std::vector<ImageF> frames(2, ImageF(8, 8, 3, 0.5f));
  const FrameVolume v = FrameVolume::from_rgb(frames);
  write_overlay(v, random_mask(8, 8, 2, 1), dir.path());
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "overlay_00001.png"));
}

}  // namespace
}  // namespace vseg
