#pragma once

// Brute-force and exhaustive references shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "vseg/image.hpp"
#include "vseg/maxflow.hpp"
#include "vseg/supervoxel.hpp"

namespace vseg::testing {

// Minimum over all 2^n assignments of inner nodes to the two sides.
inline double brute_force_min_cut(const FlowGraph& g) {
  const int n = g.nodes();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> side(n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    for (int i = 0; i < n; ++i) side[i] = (mask >> i) & 1u;
    best = std::min(best, g.cut_capacity(side));
  }
  return best;
}

// Exhaustive optimum over all two-way partitions.
inline double best_two_partition_sse(const std::vector<double>& pts, int dim) {
  const int n = static_cast<int>(pts.size()) / dim;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
    double sse = 0.0;
    for (int side = 0; side < 2; ++side) {
      std::vector<double> mean(dim, 0.0);
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (((mask >> i) & 1u) != static_cast<unsigned>(side)) continue;
        ++count;
        for (int d = 0; d < dim; ++d) mean[d] += pts[i * dim + d];
      }
      for (int i = 0; i < n; ++i) {
        if (((mask >> i) & 1u) != static_cast<unsigned>(side)) continue;
        for (int d = 0; d < dim; ++d) {
          const double e = pts[i * dim + d] - mean[d] / count;
          sse += e * e;
        }
      }
    }
    best = std::min(best, sse);
  }
  return best;
}

// Mass of |C| landing outside each column's own subspace, as a fraction of the total.
inline double cross_mass(const Eigen::MatrixXd& c, const std::vector<int>& group) {
  double cross = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      total += std::abs(c(i, j));
      if (group[i] != group[j]) cross += std::abs(c(i, j));
    }
  }
  return cross / total;
}

// True when labels equal truth under some relabeling; checks every permutation.
inline bool same_partition(const std::vector<int>& labels, const std::vector<int>& truth, int k) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < labels.size() && ok; ++i) ok = perm[labels[i]] == truth[i];
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Exhaustive check: every label is exactly one 26-connected component.
inline bool labels_are_connected(const LabelVolume& lv) {
  LabelVolume copy = lv;
  int count = 0;
  const auto comp = slic_detail::components(copy, count);
  std::map<int, std::set<int>> comps_of_label;
  for (std::size_t i = 0; i < comp.size(); ++i) comps_of_label[lv.labels[i]].insert(comp[i]);
  for (const auto& [label, comps] : comps_of_label) {
    if (comps.size() != 1) return false;
  }
  return static_cast<int>(comps_of_label.size()) == count;
}

// Foreground = truth eroded by `band`, background = outside truth dilated by `band`.
inline ImageU8 band_trimap(const ImageU8& truth, int band) {
  ImageU8 t(truth.width(), truth.height(), 1);
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      bool any = false, all = true;
      for (int dy = -band; dy <= band; ++dy) {
        for (int dx = -band; dx <= band; ++dx) {
          const bool v = truth.clamped(x + dx, y + dy) != 0;
          any |= v;
          all &= v;
        }
      }
      t(x, y) = all ? code(TrimapCode::foreground) : any ? code(TrimapCode::undetermined) : code(TrimapCode::background);
    }
  }
  return t;
}

}  // namespace vseg::testing
