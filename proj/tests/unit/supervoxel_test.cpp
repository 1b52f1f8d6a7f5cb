#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"
#include "vseg/supervoxel.hpp"

namespace vseg {
namespace {

using testing::labels_are_connected;

using testing::SineTexture;

FrameVolume flat_clip(int w, int h, int d, std::array<float, 3> color = {0.4f, 0.5f, 0.6f}) {
  std::vector<ImageF> frames;
  for (int z = 0; z < d; ++z) {
    ImageF f(w, h, 3);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) f(x, y, c) = color[c];
      }
    }
    frames.push_back(std::move(f));
  }
  return FrameVolume::from_rgb(std::move(frames));
}

// Colored texture drifting by (vx, vy) per frame.
FrameVolume textured_clip(int w, int h, int d, double vx = 0.0, double vy = 0.0, unsigned seed = 1) {
  const SineTexture r(seed), g(seed + 100), b(seed + 200);
  std::vector<ImageF> frames;
  for (int z = 0; z < d; ++z) {
    ImageF f(w, h, 3);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        f(x, y, 0) = static_cast<float>(r(x - vx * z, y - vy * z));
        f(x, y, 1) = static_cast<float>(g(x - vx * z, y - vy * z));
        f(x, y, 2) = static_cast<float>(b(x - vx * z, y - vy * z));
      }
    }
    frames.push_back(std::move(f));
  }
  return FrameVolume::from_rgb(std::move(frames));
}

TEST(InitCenters, DefaultGrid) {
  const auto vol = flat_clip(100, 100, 10);
  SlicParams p;
  const auto centers = init_centers(vol, {}, p);
  ASSERT_EQ(centers.size(), 200u);
  EXPECT_DOUBLE_EQ(centers[0].x, 5);
  EXPECT_DOUBLE_EQ(centers[0].y, 5);
  EXPECT_DOUBLE_EQ(centers[0].z, 2);
  EXPECT_DOUBLE_EQ(centers[199].z, 7);
}

TEST(InitCenters, SingleCell) {
  const auto vol = flat_clip(10, 10, 1);
  SlicParams p;
  p.n = 1;
  p.depth = 1;
  const auto centers = init_centers(vol, {}, p);
  ASSERT_EQ(centers.size(), 1u);
  EXPECT_DOUBLE_EQ(centers[0].x, 5);
  EXPECT_DOUBLE_EQ(centers[0].y, 5);
  EXPECT_DOUBLE_EQ(centers[0].z, 0);
}

TEST(InitCenters, CifClip) {
  EXPECT_EQ(grid_spacing(352, 288, 100), 32);
  const auto vol = flat_clip(352, 288, 30);
  EXPECT_EQ(init_centers(vol, {}, SlicParams{}).size(), 11u * 9u * 6u);
}

TEST(InitCenters, SamplesFeatures) {
  const auto vol = flat_clip(20, 20, 2, {1.0f, 0.0f, 0.0f});
  std::vector<FlowField> flow(2, FlowField(20, 20, 2, 0.0f));
  flow[1](10, 10, 0) = 1.5f;
  flow[1](10, 10, 1) = -0.5f;
  SlicParams p;
  p.n = 1;
  p.depth = 2;
  const auto c = init_centers(vol, flow, p);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_NEAR(c[0].L, 53.2406, 1e-3);
  EXPECT_DOUBLE_EQ(c[0].u, 1.5);
  EXPECT_DOUBLE_EQ(c[0].v, -0.5);
}

TEST(InitCenters, RejectsTinySpacing) {
  const auto vol = flat_clip(10, 10, 2);
  SlicParams p;
  p.n = 100;
  EXPECT_THROW(init_centers(vol, {}, p), config_error);
}

TEST(SlicDistance, HandEvaluatedCases) {
  const SlicParams p;
  const ClusterCenter c{10, 10, 2, 50, 5, -5, 0.5, 0.25};
  EXPECT_DOUBLE_EQ(slic_distance(c, c, p, 10), 0.0);
  ClusterCenter q = c;
  q.x += 1;
  EXPECT_NEAR(slic_distance(q, c, p, 10), std::sqrt(1.0 / 225.0), 1e-12);
  q = c;
  q.L += 1;
  EXPECT_NEAR(slic_distance(q, c, p, 10), std::sqrt(1.0 / 22.0), 1e-12);
  EXPECT_NEAR(slic_distance(q, c, p, 10), 0.2132, 1e-4);
  q = c;
  q.z += 1;
  EXPECT_NEAR(slic_distance(q, c, p, 10), std::sqrt(50.0 / 225.0), 1e-12);
  q = c;
  q.u += 3;
  EXPECT_NEAR(slic_distance(q, c, p, 10), std::sqrt(9.0 / 300.0), 1e-12);
}

TEST(SlicDistance, SymmetricAndMonotone) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-20, 20);
  const SlicParams p;
  for (int t = 0; t < 200; ++t) {
    const ClusterCenter a{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const ClusterCenter b{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    EXPECT_DOUBLE_EQ(slic_distance(a, b, p, 12), slic_distance(b, a, p, 12));
    for (double ClusterCenter::*field : {&ClusterCenter::x, &ClusterCenter::y, &ClusterCenter::z, &ClusterCenter::L,
                                         &ClusterCenter::a, &ClusterCenter::b, &ClusterCenter::u, &ClusterCenter::v}) {
      ClusterCenter far = a;
      far.*field += (a.*field >= b.*field ? 1.0 : -1.0);
      EXPECT_GT(slic_distance(far, b, p, 12), slic_distance(a, b, p, 12));
    }
  }
}

TEST(SlicIterate, NoSupervoxelCrossesAColorEdge) {
  std::vector<ImageF> frames;
  for (int z = 0; z < 6; ++z) {
    ImageF f(60, 40, 3);
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 60; ++x) {
        f(x, y, 0) = x < 33 ? 0.9f : 0.1f;
        f(x, y, 1) = 0.2f;
        f(x, y, 2) = x < 33 ? 0.1f : 0.8f;
      }
    }
    frames.push_back(std::move(f));
  }
  const auto vol = FrameVolume::from_rgb(std::move(frames));
  SlicParams p;
  p.n = 24;
  p.depth = 3;
  const auto lv = supervoxelize(vol, {}, p);
  std::vector<std::set<bool>> side(lv.num_labels());
  for (int z = 0; z < lv.depth; ++z) {
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) side[lv.at(x, y, z)].insert(x < 33);
    }
  }
  for (const auto& s : side) EXPECT_EQ(s.size(), 1u);
}

TEST(SlicIterate, UniformClipGivesRegularLattice) {
  const auto vol = flat_clip(100, 100, 10);
  const auto lv = supervoxelize(vol, {}, SlicParams{});
  std::vector<double> pop(lv.num_labels(), 0.0);
  for (int l : lv.labels) ++pop[l];
  double mean = 0.0, var = 0.0;
  for (double v : pop) mean += v;
  mean /= pop.size();
  for (double v : pop) var += (v - mean) * (v - mean);
  EXPECT_LT(std::sqrt(var / pop.size()) / mean, 0.25);
  EXPECT_EQ(lv.num_labels(), 200);
  for (int count : labels_per_frame(lv)) EXPECT_EQ(count, 100);
}

TEST(SlicIterate, EnergyNeverIncreasesAndCentersSettle) {
  const auto vol = textured_clip(96, 72, 10, 0.7, 0.2);
  SlicParams p;
  p.n = 48;
  p.iterations = 8;
  const auto lv = slic_iterate(vol, {}, init_centers(vol, {}, p), p);
  ASSERT_EQ(lv.energy.size(), 8u);
  for (std::size_t i = 1; i < lv.energy.size(); ++i) {
    EXPECT_LE(lv.energy[i], lv.energy[i - 1] * (1.0 + 1e-9));
  }
  EXPECT_LT(lv.center_shift.back(), lv.center_shift.front());
  for (int l : lv.labels) {
    ASSERT_GE(l, 0);
    ASSERT_LT(l, lv.num_labels());
  }
}

TEST(SlicIterate, UsesFlowFeature) {
  // Same color everywhere; only the flow splits the clip into two halves.
  const auto vol = flat_clip(40, 20, 4);
  std::vector<FlowField> flow(4, FlowField(40, 20, 2, 0.0f));
  for (auto& f : flow) {
    for (int y = 0; y < 20; ++y) {
      for (int x = 22; x < 40; ++x) f(x, y, 0) = 40.0f;
    }
  }
  SlicParams p;
  p.n = 8;
  p.depth = 4;
  const auto lv = supervoxelize(vol, flow, p);
  for (int l = 0; l < lv.num_labels(); ++l) {
    std::set<bool> side;
    for (std::size_t i = 0; i < lv.labels.size(); ++i) {
      if (lv.labels[i] == l) side.insert(static_cast<int>(i % 40) < 22);
    }
    EXPECT_EQ(side.size(), 1u) << "label " << l;
  }
}

TEST(SlicIterate, ThreadCountDoesNotChangeResults) {
  const auto vol = textured_clip(80, 60, 8, 1.0, 0.0, 9);
  SlicParams p;
  p.n = 30;
  p.depth = 4;
  const auto a = supervoxelize(vol, {}, p, 1);
  const auto b = supervoxelize(vol, {}, p, 4);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.energy, b.energy);
}

TEST(Connectivity, EveryLabelIsOneComponent) {
  const auto vol = textured_clip(96, 72, 10, 1.2, -0.4, 5);
  const auto lv = supervoxelize(vol, {}, SlicParams{});
  EXPECT_TRUE(labels_are_connected(lv));
  const double threshold = SlicParams{}.min_size_fraction * lv.spacing * lv.spacing * SlicParams{}.depth;
  std::vector<int> size(lv.num_labels(), 0);
  for (int l : lv.labels) ++size[l];
  for (int s : size) EXPECT_GE(s, threshold);
  for (int a = 0; a < lv.num_labels(); ++a) {
    for (int b : lv.adjacency[a]) {
      EXPECT_NE(a, b);
      EXPECT_TRUE(std::binary_search(lv.adjacency[b].begin(), lv.adjacency[b].end(), a));
    }
  }
}

LabelVolume blank_labels(int w, int h, int d, int spacing) {
  LabelVolume lv;
  lv.width = w;
  lv.height = h;
  lv.depth = d;
  lv.spacing = spacing;
  lv.labels.assign(static_cast<std::size_t>(w) * h * d, 0);
  return lv;
}

TEST(Connectivity, ConnectedLabelingUnchanged) {
  const auto vol = flat_clip(20, 20, 4);
  LabelVolume lv = blank_labels(20, 20, 4, 10);
  for (int z = 0; z < 4; ++z) {
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x < 20; ++x) lv.labels[lv.index(x, y, z)] = (y / 10) * 2 + x / 10;
    }
  }
  SlicParams p;
  p.depth = 4;
  const auto out = enforce_connectivity(lv, vol, {}, p);
  EXPECT_EQ(out.labels, lv.labels);
  EXPECT_EQ(out.num_labels(), 4);
  EXPECT_EQ(out.adjacency[0], (std::vector<int>{1, 2, 3}));
}

TEST(Connectivity, OrphanVoxelIsAbsorbed) {
  const auto vol = flat_clip(12, 12, 3);
  LabelVolume lv = blank_labels(12, 12, 3, 6);
  lv.labels[lv.index(6, 6, 1)] = 7;
  SlicParams p;
  p.depth = 3;
  const auto out = enforce_connectivity(lv, vol, {}, p);
  EXPECT_EQ(out.num_labels(), 1);
  EXPECT_EQ(out.at(6, 6, 1), 0);
}

TEST(Connectivity, SaltAndPepper) {
  const auto vol = flat_clip(20, 20, 5);
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int trial = 0; trial < 5; ++trial) {
    LabelVolume lv = blank_labels(20, 20, 5, 4);
    for (int& l : lv.labels) l = pick(rng);
    int before = 0;
    slic_detail::components(lv, before);
    SlicParams p;
    p.depth = 5;
    const auto out = enforce_connectivity(lv, vol, {}, p);
    EXPECT_LE(out.num_labels(), before);
    EXPECT_TRUE(labels_are_connected(out));
    std::vector<int> size(out.num_labels(), 0);
    for (int l : out.labels) ++size[l];
    for (int s : size) EXPECT_GE(s, p.min_size_fraction * 4 * 4 * 5);
  }
}

TEST(Connectivity, SplitLabelBecomesTwoLabels) {
  const auto vol = flat_clip(30, 10, 2);
  LabelVolume lv = blank_labels(30, 10, 2, 5);
  for (std::size_t i = 0; i < lv.labels.size(); ++i) {
    const int x = static_cast<int>(i % 30);
    lv.labels[i] = (x >= 10 && x < 20) ? 1 : 0;
  }
  SlicParams p;
  p.depth = 2;
  const auto out = enforce_connectivity(lv, vol, {}, p);
  EXPECT_EQ(out.num_labels(), 3);
  EXPECT_TRUE(labels_are_connected(out));
  EXPECT_NEAR(out.centers[2].x, 24.5, 1e-12);
}

}  // namespace
}  // namespace vseg
