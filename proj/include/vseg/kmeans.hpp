#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vseg/error.hpp"

namespace vseg {

struct KMeansOptions {
  int max_iterations = 50;
  double tolerance = 1e-6;  // stop when no center moves farther than this
  // Number of deterministic starts; start r seeds its first center at point r*N/restarts and
  // completes greedily by farthest point. The lowest-SSE run wins, earliest on ties.
  int restarts = 12;
  // When false, fewer distinct points than k reduce k. When true, empty clusters are filled
  // by splitting off points so exactly k labels are used (requires N >= k).
  bool force_k = false;
};

/// Row-major points: point i occupies [i*dim, (i+1)*dim).
struct KMeansResult {
  int k = 0;
  std::vector<int> labels;
  std::vector<double> centers;  // k * dim
  double sse = 0.0;
  int iterations = 0;
};

namespace kmeans_detail {

inline double sqdist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

inline std::vector<int> farthest_point_seeds(std::span<const double> pts, int dim, int k, int first) {
  const int n = static_cast<int>(pts.size() / dim);
  std::vector<int> seeds{first};
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(seeds.size()) < k) {
    const double* s = &pts[static_cast<std::size_t>(seeds.back()) * dim];
    int arg = -1;
    double far = 0.0;
    for (int i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sqdist(&pts[static_cast<std::size_t>(i) * dim], s, dim));
      if (best[i] > far) {
        far = best[i];
        arg = i;
      }
    }
    if (arg < 0) break;  // remaining points coincide with existing seeds
    seeds.push_back(arg);
  }
  return seeds;
}

// Single-point moves that lower the SSE once the move's effect on both means is counted.
// Every Hartigan optimum is also a Lloyd fixed point, but not conversely.
inline void hartigan(std::span<const double> pts, int dim, std::vector<double>& centers, std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  const int k = static_cast<int>(centers.size() / dim);
  std::vector<int> counts(k, 0);
  for (int l : labels) ++counts[l];
  std::fill(centers.begin(), centers.end(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) centers[static_cast<std::size_t>(labels[i]) * dim + d] += pts[static_cast<std::size_t>(i) * dim + d];
  }
  for (int c = 0; c < k; ++c) {
    for (int d = 0; d < dim && counts[c] > 0; ++d) centers[static_cast<std::size_t>(c) * dim + d] /= counts[c];
  }
  for (int pass = 0; pass < 100; ++pass) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      const int a = labels[i];
      if (counts[a] <= 1) continue;
      const double* p = &pts[static_cast<std::size_t>(i) * dim];
      const double leave = counts[a] / (counts[a] - 1.0) * sqdist(p, &centers[static_cast<std::size_t>(a) * dim], dim);
      int target = -1;
      double best = leave - 1e-12 * (1.0 + leave);
      for (int c = 0; c < k; ++c) {
        if (c == a || counts[c] == 0) continue;
        const double join = counts[c] / (counts[c] + 1.0) * sqdist(p, &centers[static_cast<std::size_t>(c) * dim], dim);
        if (join < best) {
          best = join;
          target = c;
        }
      }
      if (target < 0) continue;
      for (int d = 0; d < dim; ++d) {
        double& ca = centers[static_cast<std::size_t>(a) * dim + d];
        double& cb = centers[static_cast<std::size_t>(target) * dim + d];
        ca = (ca * counts[a] - p[d]) / (counts[a] - 1);
        cb = (cb * counts[target] + p[d]) / (counts[target] + 1);
      }
      --counts[a];
      ++counts[target];
      labels[i] = target;
      moved = true;
    }
    if (!moved) break;
  }
}

inline KMeansResult lloyd(std::span<const double> pts, int dim, std::vector<double> centers,
                          const KMeansOptions& opt) {
  const int n = static_cast<int>(pts.size() / dim);
  const int k = static_cast<int>(centers.size() / dim);
  KMeansResult r;
  r.k = k;
  r.labels.assign(n, 0);
  std::vector<double> sums(centers.size());
  std::vector<int> counts(k);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    r.iterations = iter + 1;
    for (int i = 0; i < n; ++i) {
      const double* p = &pts[static_cast<std::size_t>(i) * dim];
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sqdist(p, &centers[static_cast<std::size_t>(c) * dim], dim);
        if (d < best) {
          best = d;
          r.labels[i] = c;
        }
      }
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      ++counts[r.labels[i]];
      for (int d = 0; d < dim; ++d) sums[static_cast<std::size_t>(r.labels[i]) * dim + d] += pts[static_cast<std::size_t>(i) * dim + d];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double s = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double v = sums[static_cast<std::size_t>(c) * dim + d] / counts[c];
        s += (v - centers[static_cast<std::size_t>(c) * dim + d]) * (v - centers[static_cast<std::size_t>(c) * dim + d]);
        centers[static_cast<std::size_t>(c) * dim + d] = v;
      }
      shift = std::max(shift, s);
    }
    if (shift < opt.tolerance * opt.tolerance) break;
  }
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d = sqdist(&pts[static_cast<std::size_t>(i) * dim], &centers[static_cast<std::size_t>(c) * dim], dim);
      if (d < best) {
        best = d;
        r.labels[i] = c;
      }
    }
  }
  hartigan(pts, dim, centers, r.labels);
  r.sse = 0.0;
  for (int i = 0; i < n; ++i) {
    r.sse += sqdist(&pts[static_cast<std::size_t>(i) * dim], &centers[static_cast<std::size_t>(r.labels[i]) * dim], dim);
  }
  r.centers = std::move(centers);
  return r;
}

// Drops empty clusters, relabels densely, recomputes centers as member means.
inline void compact(std::span<const double> pts, int dim, KMeansResult& r) {
  const int n = static_cast<int>(r.labels.size());
  std::vector<int> remap(r.k, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (remap[r.labels[i]] < 0) remap[r.labels[i]] = next++;
  }
  // Keep cluster order by original index for determinism.
  std::vector<int> order;
  for (int c = 0; c < r.k; ++c) {
    if (remap[c] >= 0) order.push_back(c);
  }
  for (std::size_t j = 0; j < order.size(); ++j) remap[order[j]] = static_cast<int>(j);
  for (int& l : r.labels) l = remap[l];
  r.k = static_cast<int>(order.size());
  r.centers.assign(static_cast<std::size_t>(r.k) * dim, 0.0);
  std::vector<int> counts(r.k);
  for (int i = 0; i < n; ++i) {
    ++counts[r.labels[i]];
    for (int d = 0; d < dim; ++d) r.centers[static_cast<std::size_t>(r.labels[i]) * dim + d] += pts[static_cast<std::size_t>(i) * dim + d];
  }
  r.sse = 0.0;
  for (int c = 0; c < r.k; ++c) {
    for (int d = 0; d < dim; ++d) r.centers[static_cast<std::size_t>(c) * dim + d] /= counts[c];
  }
  for (int i = 0; i < n; ++i) {
    r.sse += sqdist(&pts[static_cast<std::size_t>(i) * dim], &r.centers[static_cast<std::size_t>(r.labels[i]) * dim], dim);
  }
}

// Moves points out of the largest clusters (highest index first) until every label is used.
inline void fill_empty(int k, KMeansResult& r) {
  std::vector<int> counts(k, 0);
  for (int l : r.labels) ++counts[l];
  r.k = k;
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    const int donor = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    for (int i = static_cast<int>(r.labels.size()) - 1; i >= 0; --i) {
      if (r.labels[i] == donor) {
        r.labels[i] = c;
        --counts[donor];
        ++counts[c];
        break;
      }
    }
  }
}

}  // namespace kmeans_detail

/// Deterministic Lloyd k-means with farthest-point seeding.
inline KMeansResult kmeans(std::span<const double> points, int dim, int k, const KMeansOptions& opt = {}) {
  if (dim < 1 || k < 1) throw config_error("k-means needs dim >= 1 and k >= 1");
  const int n = static_cast<int>(points.size() / dim);
  if (n == 0) throw insufficient_data_error("k-means on an empty point set");
  if (opt.force_k && n < k) throw insufficient_data_error("fewer points than clusters");
  const int restarts = std::clamp(opt.restarts, 1, n);
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    const int first = static_cast<int>(static_cast<long long>(r) * n / restarts);
    const auto seeds = kmeans_detail::farthest_point_seeds(points, dim, std::min(k, n), first);
    std::vector<double> centers;
    for (int s : seeds) {
      centers.insert(centers.end(), points.begin() + static_cast<std::ptrdiff_t>(s) * dim,
                     points.begin() + static_cast<std::ptrdiff_t>(s + 1) * dim);
    }
    KMeansResult run = kmeans_detail::lloyd(points, dim, std::move(centers), opt);
    kmeans_detail::compact(points, dim, run);
    if (!have || run.sse < best.sse) {
      best = std::move(run);
      have = true;
    }
  }
  if (opt.force_k && best.k < k) {
    kmeans_detail::fill_empty(k, best);
    kmeans_detail::compact(points, dim, best);
  }
  return best;
}

}  // namespace vseg
