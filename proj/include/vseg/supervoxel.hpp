#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/parallel.hpp"
#include "vseg/preprocess.hpp"

namespace vseg {

/// 8-vector (x, y, z, L*, a*, b*, u, v) used both for voxels and for cluster centers.
struct ClusterCenter {
  double x = 0, y = 0, z = 0;
  double L = 0, a = 0, b = 0;
  double u = 0, v = 0;
};

struct SlicParams {
  int n = 100;            // desired supervoxels per frame
  int depth = 5;          // D, frames per supervoxel; also the temporal grid spacing
  double m = 22.0;        // regularity
  double w_m = 1.0;       // motion weight
  double w_z = 50.0;      // temporal distance weight
  double w_L = 1.0;       // L* weight
  double frame_rate = 30.0;
  int iterations = 5;
  double min_size_fraction = 1.0 / 16.0;  // of the nominal volume S*S*D
};

/// S = round(sqrt(W*H/n)).
inline int grid_spacing(int width, int height, int n) {
  if (n < 1) throw config_error("supervoxels per frame must be positive");
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(width) * height / n)));
}

inline void validate(const SlicParams& p, int spacing) {
  if (spacing < 2) throw config_error("supervoxel grid spacing below 2 pixels; lower the supervoxel count");
  if (p.depth < 1) throw config_error("supervoxel depth must be at least 1");
  if (!(p.m > 0)) throw config_error("SLIC regularity m must be positive");
  if (p.w_m < 0 || p.w_z < 0 || p.w_L < 0) throw config_error("SLIC weights must be nonnegative");
  if (!(p.frame_rate > 0)) throw config_error("frame rate must be positive");
  if (p.iterations < 0) throw config_error("SLIC iterations must be nonnegative");
}

/// Squared distance between a voxel feature and a center:
///   dl2 / (2S^2 + D^2) + dc2 / m + w_m * dm2 / (R * S)
/// with dl2 = dx^2 + dy^2 + w_z dz^2, dc2 = w_L dL^2 + da^2 + db^2, dm2 = du^2 + dv^2.
inline double slic_distance_sq(const ClusterCenter& p, const ClusterCenter& c, const SlicParams& params, int spacing) {
  const double s = spacing;
  const double d = params.depth;
  const double dl = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y) + params.w_z * (p.z - c.z) * (p.z - c.z);
  const double dc = params.w_L * (p.L - c.L) * (p.L - c.L) + (p.a - c.a) * (p.a - c.a) + (p.b - c.b) * (p.b - c.b);
  const double dm = (p.u - c.u) * (p.u - c.u) + (p.v - c.v) * (p.v - c.v);
  return dl / (2.0 * s * s + d * d) + dc / params.m + params.w_m * dm / (params.frame_rate * s);
}

inline double slic_distance(const ClusterCenter& p, const ClusterCenter& c, const SlicParams& params, int spacing) {
  return std::sqrt(slic_distance_sq(p, c, params, spacing));
}

/// Per-voxel supervoxel ids over a clip, with the centers and the 26-neighborhood adjacency.
struct LabelVolume {
  int width = 0, height = 0, depth = 0;
  int spacing = 0;
  std::vector<int> labels;                 // x fastest, then y, then z
  std::vector<ClusterCenter> centers;
  std::vector<std::vector<int>> adjacency;  // sorted neighbor ids; filled by enforce_connectivity
  std::vector<double> energy;               // sum of squared distances after each assignment
  std::vector<double> center_shift;         // mean (x, y, z) center movement of each update

  int num_labels() const { return static_cast<int>(centers.size()); }
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * height + y) * width + x;
  }
  int at(int x, int y, int z) const { return labels[index(x, y, z)]; }
};

namespace slic_detail {

inline ClusterCenter feature(const FrameVolume& vol, const std::vector<FlowField>& flow, int x, int y, int z) {
  const ImageF& lab = vol.lab(z);
  ClusterCenter f{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z),
                  lab(x, y, 0), lab(x, y, 1), lab(x, y, 2), 0.0, 0.0};
  if (!flow.empty()) {
    f.u = flow[z](x, y, 0);
    f.v = flow[z](x, y, 1);
  }
  return f;
}

inline void check_flow(const FrameVolume& vol, const std::vector<FlowField>& flow) {
  if (flow.empty()) return;
  if (static_cast<int>(flow.size()) != vol.depth()) throw dimension_error("one flow field per frame expected");
  for (const auto& f : flow) {
    if (f.width() != vol.width() || f.height() != vol.height() || f.channels() != 2) {
      throw dimension_error("flow field does not match the clip");
    }
  }
}

struct Sums {
  std::array<double, 8> s{};
  long long count = 0;
};

// Member means per label; partial sums are per frame and added in frame order, so the result
// does not depend on the thread count.
inline std::vector<Sums> accumulate(const FrameVolume& vol, const std::vector<FlowField>& flow,
                                    const std::vector<int>& labels, int k, int threads) {
  const int w = vol.width(), h = vol.height(), d = vol.depth();
  std::vector<std::vector<Sums>> per_frame(d, std::vector<Sums>(k));
  parallel_for(d, threads, [&](int z) {
    auto& acc = per_frame[z];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int l = labels[(static_cast<std::size_t>(z) * h + y) * w + x];
        const ClusterCenter f = feature(vol, flow, x, y, z);
        Sums& s = acc[l];
        const std::array<double, 8> v{f.x, f.y, f.z, f.L, f.a, f.b, f.u, f.v};
        for (int i = 0; i < 8; ++i) s.s[i] += v[i];
        ++s.count;
      }
    }
  });
  std::vector<Sums> total(k);
  for (int z = 0; z < d; ++z) {
    for (int l = 0; l < k; ++l) {
      for (int i = 0; i < 8; ++i) total[l].s[i] += per_frame[z][l].s[i];
      total[l].count += per_frame[z][l].count;
    }
  }
  return total;
}

// Voxels that no search box has reached take the nearest center overall.
inline void fill_unreached(const FrameVolume& vol, const std::vector<FlowField>& flow,
                           const std::vector<ClusterCenter>& centers, const SlicParams& params, int spacing,
                           std::vector<int>& labels, std::vector<double>& best) {
  const int w = vol.width(), h = vol.height();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) continue;
    const int x = static_cast<int>(i % w), y = static_cast<int>((i / w) % h), z = static_cast<int>(i / (static_cast<std::size_t>(w) * h));
    const ClusterCenter f = feature(vol, flow, x, y, z);
    for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
      const double dist = slic_distance_sq(f, centers[c], params, spacing);
      if (dist < best[i]) {
        best[i] = dist;
        labels[i] = c;
      }
    }
  }
}

inline ClusterCenter mean_of(const Sums& s) {
  const double c = static_cast<double>(s.count);
  return {s.s[0] / c, s.s[1] / c, s.s[2] / c, s.s[3] / c, s.s[4] / c, s.s[5] / c, s.s[6] / c, s.s[7] / c};
}

}  // namespace slic_detail

/// Centers at the middle of every S x S x D grid cell (partial cells at the far edges
/// included), with features sampled at that voxel.
inline std::vector<ClusterCenter> init_centers(const FrameVolume& vol, const std::vector<FlowField>& flow,
                                               const SlicParams& params) {
  slic_detail::check_flow(vol, flow);
  const int s = grid_spacing(vol.width(), vol.height(), params.n);
  validate(params, s);
  std::vector<ClusterCenter> centers;
  for (int z0 = 0; z0 < vol.depth(); z0 += params.depth) {
    const int cz = (z0 + std::min(z0 + params.depth, vol.depth())) / 2;
    for (int y0 = 0; y0 < vol.height(); y0 += s) {
      const int cy = (y0 + std::min(y0 + s, vol.height())) / 2;
      for (int x0 = 0; x0 < vol.width(); x0 += s) {
        const int cx = (x0 + std::min(x0 + s, vol.width())) / 2;
        centers.push_back(slic_detail::feature(vol, flow, cx, cy, cz));
      }
    }
  }
  return centers;
}

/// Assignment/update iterations. Each center scans +-S in x and y and +-D in z around itself;
/// a voxel moves to a center strictly closer than its current one (equal distance: lower id).
/// Empty clusters are dropped and ids re-densified after every update.
inline LabelVolume slic_iterate(const FrameVolume& vol, const std::vector<FlowField>& flow,
                                std::vector<ClusterCenter> centers, const SlicParams& params, int threads = 1) {
  slic_detail::check_flow(vol, flow);
  const int w = vol.width(), h = vol.height(), d = vol.depth();
  const int s = grid_spacing(w, h, params.n);
  validate(params, s);
  if (centers.empty()) throw config_error("no supervoxel centers");

  LabelVolume out;
  out.width = w;
  out.height = h;
  out.depth = d;
  out.spacing = s;
  out.labels.assign(static_cast<std::size_t>(w) * h * d, -1);
  std::vector<double> best(out.labels.size(), std::numeric_limits<double>::infinity());

  for (int iter = 0; iter < params.iterations; ++iter) {
    const int k = static_cast<int>(centers.size());
    // Centers whose search box reaches each frame, in id order.
    std::vector<std::vector<int>> reach(d);
    for (int c = 0; c < k; ++c) {
      const long cz = std::lround(centers[c].z);
      for (long z = std::max(0L, cz - params.depth); z <= std::min<long>(d - 1, cz + params.depth); ++z) {
        reach[z].push_back(c);
      }
    }
    parallel_for(d, threads, [&](int z) {
      const std::size_t base = static_cast<std::size_t>(z) * w * h;
      // Start from the distance to the current center so the energy cannot go up.
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::size_t i = base + static_cast<std::size_t>(y) * w + x;
          const int l = out.labels[i];
          best[i] = l < 0 ? std::numeric_limits<double>::infinity()
                          : slic_distance_sq(slic_detail::feature(vol, flow, x, y, z), centers[l], params, s);
        }
      }
      for (int c : reach[z]) {
        const ClusterCenter& cc = centers[c];
        const long cx = std::lround(cc.x), cy = std::lround(cc.y);
        const int x0 = static_cast<int>(std::max(0L, cx - s)), x1 = static_cast<int>(std::min<long>(w - 1, cx + s));
        const int y0 = static_cast<int>(std::max(0L, cy - s)), y1 = static_cast<int>(std::min<long>(h - 1, cy + s));
        for (int y = y0; y <= y1; ++y) {
          for (int x = x0; x <= x1; ++x) {
            const std::size_t i = base + static_cast<std::size_t>(y) * w + x;
            const double dist = slic_distance_sq(slic_detail::feature(vol, flow, x, y, z), cc, params, s);
            if (dist < best[i] || (dist == best[i] && c < out.labels[i])) {
              best[i] = dist;
              out.labels[i] = c;
            }
          }
        }
      }
    });
    slic_detail::fill_unreached(vol, flow, centers, params, s, out.labels, best);
    double energy = 0.0;
    for (double b : best) energy += b;
    out.energy.push_back(energy);

    const auto sums = slic_detail::accumulate(vol, flow, out.labels, k, threads);
    std::vector<int> remap(k, -1);
    std::vector<ClusterCenter> next;
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (sums[c].count == 0) continue;
      remap[c] = static_cast<int>(next.size());
      next.push_back(slic_detail::mean_of(sums[c]));
      const ClusterCenter& a = centers[c];
      const ClusterCenter& b = next.back();
      shift += std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
    }
    out.center_shift.push_back(shift / static_cast<double>(next.size()));
    if (static_cast<int>(next.size()) != k) {
      for (int& l : out.labels) l = remap[l];
    }
    centers = std::move(next);
  }
  if (params.iterations == 0) slic_detail::fill_unreached(vol, flow, centers, params, s, out.labels, best);
  out.centers = std::move(centers);
  return out;
}

namespace slic_detail {

// The 13 offsets that, with their negatives, make up the 26-neighborhood.
inline const std::array<std::array<int, 3>, 13>& half_neighborhood() {
  static const auto offsets = [] {
    std::array<std::array<int, 3>, 13> o{};
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dz > 0 || (dz == 0 && dy > 0) || (dz == 0 && dy == 0 && dx > 0)) o[n++] = {dx, dy, dz};
        }
      }
    }
    return o;
  }();
  return offsets;
}

// 26-connected components of equal labels, numbered in raster order of first voxel.
inline std::vector<int> components(const LabelVolume& lv, int& count) {
  const int w = lv.width, h = lv.height, d = lv.depth;
  std::vector<int> comp(lv.labels.size(), -1);
  std::vector<std::size_t> stack;
  count = 0;
  for (std::size_t seed = 0; seed < comp.size(); ++seed) {
    if (comp[seed] >= 0) continue;
    const int label = lv.labels[seed];
    comp[seed] = count;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(i % w), y = static_cast<int>((i / w) % h), z = static_cast<int>(i / (static_cast<std::size_t>(w) * h));
      for (int dz = -1; dz <= 1; ++dz) {
        const int nz = z + dz;
        if (nz < 0 || nz >= d) continue;
        for (int dy = -1; dy <= 1; ++dy) {
          const int ny = y + dy;
          if (ny < 0 || ny >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            if (nx < 0 || nx >= w) continue;
            const std::size_t j = lv.index(nx, ny, nz);
            if (comp[j] < 0 && lv.labels[j] == label) {
              comp[j] = count;
              stack.push_back(j);
            }
          }
        }
      }
    }
    ++count;
  }
  return comp;
}

template <typename Fn>
void for_each_contact(const LabelVolume& lv, const std::vector<int>& comp, Fn&& fn) {
  const int w = lv.width, h = lv.height, d = lv.depth;
  for (int z = 0; z < d; ++z) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int a = comp[lv.index(x, y, z)];
        for (const auto& o : half_neighborhood()) {
          const int nx = x + o[0], ny = y + o[1], nz = z + o[2];
          if (nx < 0 || ny < 0 || nz < 0 || nx >= w || ny >= h || nz >= d) continue;
          const int b = comp[lv.index(nx, ny, nz)];
          if (a != b) fn(a, b);
        }
      }
    }
  }
}

inline int find(std::vector<int>& parent, int a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

}  // namespace slic_detail

/// Makes every label one 26-connected component: components below
/// min_size_fraction * S*S*D voxels join the neighboring component with which they share the
/// most 26-neighbor contacts, repeated until none is left (or only one component remains).
/// Labels are then renumbered in raster order, centers recomputed and adjacency filled in.
inline LabelVolume enforce_connectivity(LabelVolume lv, const FrameVolume& vol, const std::vector<FlowField>& flow,
                                        const SlicParams& params, int threads = 1) {
  if (lv.width != vol.width() || lv.height != vol.height() || lv.depth != vol.depth()) {
    throw dimension_error("label volume does not match the clip");
  }
  const double threshold = params.min_size_fraction * lv.spacing * lv.spacing * params.depth;
  while (true) {
    int count = 0;
    std::vector<int> comp = slic_detail::components(lv, count);
    std::vector<long long> size(count, 0);
    for (int c : comp) ++size[c];
    std::vector<std::uint8_t> small(count, 0);
    bool any = false;
    for (int c = 0; c < count; ++c) {
      small[c] = size[c] < threshold;
      any = any || small[c];
    }
    lv.labels = comp;
    if (!any || count == 1) break;
    // Contact counts for pairs touching a small component.
    std::vector<std::unordered_map<int, long long>> contact(count);
    slic_detail::for_each_contact(lv, comp, [&](int a, int b) {
      if (small[a]) ++contact[a][b];
      if (small[b]) ++contact[b][a];
    });
    std::vector<int> parent(count);
    std::iota(parent.begin(), parent.end(), 0);
    bool merged = false;
    for (int c = 0; c < count; ++c) {
      if (!small[c] || contact[c].empty()) continue;
      int target = -1;
      long long most = -1;
      for (const auto& [n, cnt] : contact[c]) {
        if (cnt > most || (cnt == most && n < target)) {
          most = cnt;
          target = n;
        }
      }
      const int ra = slic_detail::find(parent, c);
      const int rb = slic_detail::find(parent, target);
      if (ra != rb) {
        parent[ra] = rb;
        merged = true;
      }
    }
    if (!merged) break;
    for (int& l : lv.labels) l = slic_detail::find(parent, l);
  }
  // Raster-order renumbering.
  std::vector<int> remap;
  {
    int mx = 0;
    for (int l : lv.labels) mx = std::max(mx, l);
    remap.assign(mx + 1, -1);
  }
  int next = 0;
  for (int& l : lv.labels) {
    if (remap[l] < 0) remap[l] = next++;
    l = remap[l];
  }
  const auto sums = slic_detail::accumulate(vol, flow, lv.labels, next, threads);
  lv.centers.clear();
  for (const auto& s : sums) lv.centers.push_back(slic_detail::mean_of(s));
  lv.adjacency.assign(next, {});
  slic_detail::for_each_contact(lv, lv.labels, [&](int a, int b) {
    lv.adjacency[a].push_back(b);
    lv.adjacency[b].push_back(a);
  });
  for (auto& adj : lv.adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return lv;
}

/// init_centers -> slic_iterate -> enforce_connectivity. `flow` may be empty (zero motion).
inline LabelVolume supervoxelize(const FrameVolume& vol, const std::vector<FlowField>& flow, const SlicParams& params,
                                 int threads = 1) {
  auto centers = init_centers(vol, flow, params);
  return enforce_connectivity(slic_iterate(vol, flow, std::move(centers), params, threads), vol, flow, params, threads);
}

/// Number of distinct labels present in each frame.
inline std::vector<int> labels_per_frame(const LabelVolume& lv) {
  std::vector<int> out(lv.depth, 0);
  std::vector<int> stamp(lv.num_labels(), -1);
  for (int z = 0; z < lv.depth; ++z) {
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) {
        const int l = lv.at(x, y, z);
        if (stamp[l] != z) {
          stamp[l] = z;
          ++out[z];
        }
      }
    }
  }
  return out;
}

}  // namespace vseg
