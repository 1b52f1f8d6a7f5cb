#pragma once

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "vseg/error.hpp"

namespace vseg {

/// Capacitated s-t graph over `nodes` inner nodes. Each inner node carries a source link
/// (source -> node) and a sink link (node -> sink).
class FlowGraph {
 public:
  struct Edge {
    int from, to;
    double capacity, reverse_capacity;
  };

  explicit FlowGraph(int nodes = 0) : source_(nodes, 0.0), sink_(nodes, 0.0) {}

  int nodes() const { return static_cast<int>(source_.size()); }

  void add_edge(int from, int to, double capacity, double reverse_capacity = 0.0) {
    check_node(from);
    check_node(to);
    if (from == to) throw config_error("self loops are not allowed in a flow graph");
    check_capacity(capacity);
    check_capacity(reverse_capacity);
    edges_.push_back({from, to, capacity, reverse_capacity});
  }

  /// Adds to the node's terminal capacities.
  void add_tlinks(int node, double source_capacity, double sink_capacity) {
    check_node(node);
    check_capacity(source_capacity);
    check_capacity(sink_capacity);
    source_[node] += source_capacity;
    sink_[node] += sink_capacity;
  }

  const std::vector<Edge>& edges() const { return edges_; }
  double source_capacity(int node) const { return source_[node]; }
  double sink_capacity(int node) const { return sink_[node]; }

  /// Sum of every capacity in the graph.
  double total_capacity() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.capacity + e.reverse_capacity;
    for (int i = 0; i < nodes(); ++i) s += source_[i] + sink_[i];
    return s;
  }

  /// Capacity of the cut where sink_side[i] != 0 puts node i with the sink.
  double cut_capacity(const std::vector<std::uint8_t>& sink_side) const {
    double c = 0.0;
    for (int i = 0; i < nodes(); ++i) c += sink_side[i] ? source_[i] : sink_[i];
    for (const auto& e : edges_) {
      if (!sink_side[e.from] && sink_side[e.to]) c += e.capacity;
      if (sink_side[e.from] && !sink_side[e.to]) c += e.reverse_capacity;
    }
    return c;
  }

 private:
  void check_node(int n) const {
    if (n < 0 || n >= nodes()) throw config_error("flow graph node out of range");
  }
  static void check_capacity(double c) {
    if (!(c >= 0.0) || c == std::numeric_limits<double>::infinity()) {
      throw config_error("flow graph capacities must be finite and nonnegative");
    }
  }

  std::vector<double> source_;
  std::vector<double> sink_;
  std::vector<Edge> edges_;
};

struct CutResult {
  double flow = 0.0;
  std::vector<std::uint8_t> sink_side;  // 1 = sink side of the minimum cut
};

/// Exact max-flow by Boykov-Kolmogorov (Boost.Graph). A node is on the sink side when it can
/// still reach the sink in the residual graph; every other node is on the source side.
inline CutResult max_flow_min_cut(const FlowGraph& graph) {
  using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
  using Graph = boost::adjacency_list<
      boost::vecS, boost::vecS, boost::directedS,
      boost::property<boost::vertex_index_t, long,
                      boost::property<boost::vertex_color_t, boost::default_color_type,
                                      boost::property<boost::vertex_distance_t, long,
                                                      boost::property<boost::vertex_predecessor_t, Traits::edge_descriptor>>>>,
      boost::property<boost::edge_capacity_t, double,
                      boost::property<boost::edge_residual_capacity_t, double,
                                      boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;

  const int n = graph.nodes();
  const int s = n;
  const int t = n + 1;
  Graph g(n + 2);
  auto cap = boost::get(boost::edge_capacity, g);
  auto rev = boost::get(boost::edge_reverse, g);
  auto link = [&](int a, int b, double c_ab, double c_ba) {
    const auto e = boost::add_edge(a, b, g).first;
    const auto r = boost::add_edge(b, a, g).first;
    cap[e] = c_ab;
    cap[r] = c_ba;
    rev[e] = r;
    rev[r] = e;
  };
  for (int i = 0; i < n; ++i) {
    if (graph.source_capacity(i) > 0) link(s, i, graph.source_capacity(i), 0.0);
    if (graph.sink_capacity(i) > 0) link(i, t, graph.sink_capacity(i), 0.0);
  }
  for (const auto& e : graph.edges()) {
    if (e.capacity > 0 || e.reverse_capacity > 0) link(e.from, e.to, e.capacity, e.reverse_capacity);
  }

  CutResult out;
  out.flow = boost::boykov_kolmogorov_max_flow(g, s, t);
  const auto color = boost::get(boost::vertex_color, g);
  out.sink_side.resize(n);
  for (int i = 0; i < n; ++i) {
    out.sink_side[i] = boost::get(color, i) == boost::white_color;
  }
  assert(std::abs(out.flow - graph.cut_capacity(out.sink_side)) <= 1e-9 * std::max(1.0, out.flow));
  return out;
}

}  // namespace vseg
