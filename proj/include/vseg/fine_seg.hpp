#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/frame_volume.hpp"
#include "vseg/gmm.hpp"
#include "vseg/image.hpp"
#include "vseg/maxflow.hpp"
#include "vseg/parallel.hpp"

namespace vseg {

enum class DataTerm {
  component,  // min over components of -log(pi_k N_k): the energy minimized jointly with k
  mixture,    // -log of the full mixture density
};

struct GrabCutParams {
  int components = 5;        // K per side
  double gamma = 50.0;       // smoothness weight
  int max_iterations = 5;
  DataTerm data_term = DataTerm::component;
  double covariance_floor = kCovarianceFloor;
  double border_fraction = 0.05;  // band used as background when the trimap has none
};

enum class SegStatus {
  ok,
  no_background_seed,  // trimap had no background: border band used instead
  empty_foreground,    // nothing could be foreground: all-background mask
};

/// Side assignment: 0 background, 1 foreground; per pixel, row-major.
using Labeling = std::vector<std::uint8_t>;

/// Per-pixel component index within the pixel's current side model.
struct ComponentVector {
  std::vector<int> component;
  Labeling side;
};

/// The graph of one frame plus what is needed to score labelings on it.
struct SegGraph {
  FlowGraph graph;
  std::vector<double> cost_background;  // data cost of labeling each pixel background
  std::vector<double> cost_foreground;
  double hard = 0.0;                    // constant used on fixed pixels' t-links
  double beta = 0.0;
  int width = 0, height = 0;

  /// Data terms of the labeling plus smoothness weights of every cut neighbor pair.
  double energy(const Labeling& label) const {
    double e = 0.0;
    for (std::size_t i = 0; i < label.size(); ++i) e += label[i] ? cost_foreground[i] : cost_background[i];
    for (const auto& edge : graph.edges()) {
      if (label[edge.from] != label[edge.to]) e += edge.capacity;
    }
    return e;
  }
};

struct GrabCutResult {
  ImageU8 mask;                        // 0/1
  int iterations = 0;
  std::vector<double> energy;          // after each cut
  SegStatus status = SegStatus::ok;
  std::string warning;
  std::vector<ImageU8> intermediate;   // labeling after each cut, for debug export
};

namespace grabcut_detail {

inline Color pixel(const ImageF& frame, int x, int y) { return {frame(x, y, 0), frame(x, y, 1), frame(x, y, 2)}; }

inline std::vector<Color> pixels_of(const ImageF& frame) {
  std::vector<Color> out;
  out.reserve(static_cast<std::size_t>(frame.width()) * frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) out.push_back(pixel(frame, x, y));
  }
  return out;
}

// Forward half of the 8-neighborhood with distances.
struct Offset {
  int dx, dy;
  double dist;
};
inline constexpr Offset kForward[4] = {{1, 0, 1.0}, {0, 1, 1.0}, {1, 1, std::numbers::sqrt2}, {-1, 1, std::numbers::sqrt2}};

inline double side_cost(const GmmModel& model, const Color& z, DataTerm term) {
  return term == DataTerm::component ? model.neg_log_component(z) : model.neg_log_mixture(z);
}

inline GmmModel fit_side(const std::vector<Color>& pixels, const Labeling& side, std::uint8_t which, int k,
                         double floor) {
  std::vector<Color> members;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (side[i] == which) members.push_back(pixels[i]);
  }
  return fit_gmm(members, k, floor);
}

}  // namespace grabcut_detail

/// beta = 1 / (2 * mean squared color difference over all 8-neighbor pairs); 0 when the frame
/// is constant.
inline double contrast_beta(const ImageF& frame) {
  double sum = 0.0;
  long long pairs = 0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      for (const auto& o : grabcut_detail::kForward) {
        const int nx = x + o.dx, ny = y + o.dy;
        if (!frame.contains(nx, ny)) continue;
        sum += (grabcut_detail::pixel(frame, x, y) - grabcut_detail::pixel(frame, nx, ny)).squaredNorm();
        ++pairs;
      }
    }
  }
  return (pairs == 0 || sum <= 0.0) ? 0.0 : 1.0 / (2.0 * sum / pairs);
}

/// Per-pixel best component within the model of the pixel's side (ties: lowest index).
inline ComponentVector assign_components(const ImageF& frame, const GmmModel& foreground, const GmmModel& background,
                                         const Labeling& side) {
  ComponentVector out;
  out.side = side;
  out.component.resize(side.size());
  std::size_t i = 0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x, ++i) {
      const Color z = grabcut_detail::pixel(frame, x, y);
      out.component[i] = (side[i] ? foreground : background).best_component(z);
    }
  }
  return out;
}

/// Refits each side's mixture from the pixels currently assigned to each of its components.
/// Components left without pixels are dropped and `kv` is renumbered to match.
inline void refit_models(const ImageF& frame, ComponentVector& kv, GmmModel& foreground, GmmModel& background,
                         double floor = kCovarianceFloor) {
  const auto pixels = grabcut_detail::pixels_of(frame);
  for (int which = 0; which < 2; ++which) {
    GmmModel& model = which ? foreground : background;
    std::vector<int> remap(model.size(), 0);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      if (kv.side[i] == which) remap[kv.component[i]] = 1;
    }
    int next = 0;
    for (int& r : remap) r = r ? next++ : -1;
    if (next == 0) continue;
    std::vector<Color> members;
    std::vector<int> labels;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      if (kv.side[i] != which) continue;
      kv.component[i] = remap[kv.component[i]];
      members.push_back(pixels[i]);
      labels.push_back(kv.component[i]);
    }
    model = gmm_from_clusters(members, labels, next, floor);
  }
}

/// Source = background terminal, sink = foreground terminal. The source link of a pixel is
/// its cost of becoming foreground and the sink link its cost of becoming background (both
/// shifted so the smaller is zero). Trimap background pixels get a hard source link,
/// foreground pixels a hard sink link; undetermined pixels are free.
inline SegGraph build_graph(const ImageF& frame, const ImageU8& trimap, const GmmModel& foreground,
                            const GmmModel& background, const GrabCutParams& params) {
  const int w = frame.width(), h = frame.height();
  if (trimap.width() != w || trimap.height() != h) throw dimension_error("trimap does not match the frame");
  SegGraph g;
  g.width = w;
  g.height = h;
  g.graph = FlowGraph(w * h);
  g.beta = contrast_beta(frame);
  g.cost_background.resize(static_cast<std::size_t>(w) * h);
  g.cost_foreground.resize(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = y * w + x;
      const Color z = grabcut_detail::pixel(frame, x, y);
      g.cost_background[i] = grabcut_detail::side_cost(background, z, params.data_term);
      g.cost_foreground[i] = grabcut_detail::side_cost(foreground, z, params.data_term);
      for (const auto& o : grabcut_detail::kForward) {
        const int nx = x + o.dx, ny = y + o.dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const double diff = (z - grabcut_detail::pixel(frame, nx, ny)).squaredNorm();
        const double weight = params.gamma * std::exp(-g.beta * diff) / o.dist;
        g.graph.add_edge(i, ny * w + nx, weight, weight);
      }
    }
  }
  for (int i = 0; i < w * h; ++i) {
    const double lo = std::min(g.cost_background[i], g.cost_foreground[i]);
    const std::uint8_t t = trimap.data()[i];
    if (t == code(TrimapCode::undetermined)) g.graph.add_tlinks(i, g.cost_foreground[i] - lo, g.cost_background[i] - lo);
  }
  g.hard = g.graph.total_capacity() + 1.0;
  for (int i = 0; i < w * h; ++i) {
    const std::uint8_t t = trimap.data()[i];
    if (t == code(TrimapCode::background)) g.graph.add_tlinks(i, g.hard, 0.0);
    if (t == code(TrimapCode::foreground)) g.graph.add_tlinks(i, 0.0, g.hard);
  }
  return g;
}

/// Iterated GrabCut on one frame. Undetermined pixels start as foreground; each round assigns
/// components, refits both mixtures, rebuilds the graph and cuts, until the labeling stops
/// changing or max_iterations rounds have run.
inline GrabCutResult grabcut_iterate(const ImageF& frame, const ImageU8& trimap_in, const GrabCutParams& params = {}) {
  const int w = frame.width(), h = frame.height();
  if (frame.channels() != 3) throw dimension_error("GrabCut needs an RGB frame");
  if (trimap_in.width() != w || trimap_in.height() != h) throw dimension_error("trimap does not match the frame");
  if (params.components < 1 || params.max_iterations < 1 || params.gamma < 0) {
    throw config_error("GrabCut needs K >= 1, at least one iteration and gamma >= 0");
  }
  GrabCutResult out;
  ImageU8 trimap = trimap_in;
  auto count = [&](TrimapCode c) { return std::count(trimap.data().begin(), trimap.data().end(), code(c)); };

  if (count(TrimapCode::background) == 0) {
    const int band = std::max(1, static_cast<int>(std::lround(params.border_fraction * std::min(w, h))));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool border = x < band || y < band || x >= w - band || y >= h - band;
        if (border && trimap(x, y) == code(TrimapCode::undetermined)) trimap(x, y) = code(TrimapCode::background);
      }
    }
    out.status = SegStatus::no_background_seed;
    out.warning = "trimap has no background; using a border band of " + std::to_string(band) + " px";
  }
  if (count(TrimapCode::background) == 0) {
    // Only foreground left: nothing to separate.
    out.mask = ImageU8(w, h, 1, 1);
    for (std::size_t i = 0; i < trimap.data().size(); ++i) out.mask.data()[i] = trimap.data()[i] != code(TrimapCode::background);
    out.warning = "trimap has no background and no undetermined border; returning the trimap";
    return out;
  }
  if (count(TrimapCode::background) == static_cast<long>(trimap.data().size())) {
    out.mask = ImageU8(w, h, 1, 0);
    out.status = SegStatus::empty_foreground;
    out.warning = "trimap has no foreground or undetermined pixels; mask is all background";
    return out;
  }

  Labeling label(trimap.data().size());
  for (std::size_t i = 0; i < label.size(); ++i) label[i] = trimap.data()[i] != code(TrimapCode::background);
  const auto pixels = grabcut_detail::pixels_of(frame);
  GmmModel fg = grabcut_detail::fit_side(pixels, label, 1, params.components, params.covariance_floor);
  GmmModel bg = grabcut_detail::fit_side(pixels, label, 0, params.components, params.covariance_floor);

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    ComponentVector kv = assign_components(frame, fg, bg, label);
    refit_models(frame, kv, fg, bg, params.covariance_floor);
    const SegGraph g = build_graph(frame, trimap, fg, bg, params);
    const CutResult cut = max_flow_min_cut(g.graph);
    Labeling next(cut.sink_side.begin(), cut.sink_side.end());
    out.energy.push_back(g.energy(next));
    out.iterations = iter + 1;
    ImageU8 step(w, h, 1);
    std::copy(next.begin(), next.end(), step.data().begin());
    out.intermediate.push_back(step);
    const bool unchanged = next == label;
    label = std::move(next);
    if (unchanged) break;
    if (std::none_of(label.begin(), label.end(), [](std::uint8_t v) { return v != 0; })) break;
  }
  out.mask = ImageU8(w, h, 1);
  std::copy(label.begin(), label.end(), out.mask.data().begin());
  return out;
}

struct ClipSegmentation {
  MaskSequence masks;
  std::vector<GrabCutResult> frames;
  std::vector<std::string> warnings;  // "frame N: ..." for every frame that needed a fallback
};

/// grabcut_iterate on every frame with that frame's trimap; frames run in parallel.
inline ClipSegmentation segment_clip(const FrameVolume& volume, const Trimap& trimap, const GrabCutParams& params = {},
                                     int threads = 1) {
  if (static_cast<int>(trimap.size()) != volume.depth() || trimap.width() != volume.width() ||
      trimap.height() != volume.height()) {
    throw dimension_error("trimap does not match the clip");
  }
  ClipSegmentation out;
  out.frames.resize(volume.depth());
  parallel_for(volume.depth(), threads,
               [&](int z) { out.frames[z] = grabcut_iterate(volume.rgb(z), trimap.frames[z], params); });
  for (int z = 0; z < volume.depth(); ++z) {
    out.masks.frames.push_back(out.frames[z].mask);
    if (!out.frames[z].warning.empty()) out.warnings.push_back("frame " + std::to_string(z) + ": " + out.frames[z].warning);
  }
  return out;
}

}  // namespace vseg
