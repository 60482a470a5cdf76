#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ato/graph.hpp"

namespace ato {

// Directed arc with a positive integer weight. The underlying undirected
// edge is the arc's identity: constructions key their bookkeeping on
// source_edge() so that reversals and weight bumps land on the intended
// edge even after a chain has been relabeled.
struct Arc {
  Vertex tail;
  Vertex head;
  int weight = 1;

  Edge source_edge() const { return Edge(tail, head); }
  friend bool operator==(const Arc&, const Arc&) = default;
};

class WeightedOrientation {
 public:
  WeightedOrientation() = default;
  explicit WeightedOrientation(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    normalize();
  }

  void add(const Arc& a) {
    arcs_.push_back(a);
    normalize();
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }

  std::int64_t d_plus(Vertex v) const {
    std::int64_t d = 0;
    for (const Arc& a : arcs_)
      if (a.tail == v) d += a.weight;
    return d;
  }

  std::int64_t d_minus(Vertex v) const {
    std::int64_t d = 0;
    for (const Arc& a : arcs_)
      if (a.head == v) d += a.weight;
    return d;
  }

  std::int64_t total_weight() const {
    std::int64_t t = 0;
    for (const Arc& a : arcs_) t += a.weight;
    return t;
  }

  bool all_unit_weight() const {
    for (const Arc& a : arcs_)
      if (a.weight != 1) return false;
    return true;
  }

  std::vector<Vertex> vertices() const {
    std::vector<Vertex> vs;
    for (const Arc& a : arcs_) {
      vs.push_back(a.tail);
      vs.push_back(a.head);
    }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }

 private:
  void normalize() {
    std::sort(arcs_.begin(), arcs_.end(), [](const Arc& x, const Arc& y) {
      return std::tie(x.tail, x.head) < std::tie(y.tail, y.head);
    });
  }

  std::vector<Arc> arcs_;
};

// Orientation of the S multiset: one arrow per S copy. Parallel arrows are
// possible on K2 and nowhere else.
class OrientedBoundary {
 public:
  using Arrow = std::pair<Vertex, Vertex>;

  OrientedBoundary() = default;

  void add(Vertex tail, Vertex head) {
    arrows_.emplace_back(tail, head);
    std::sort(arrows_.begin(), arrows_.end());
  }

  bool contains(Vertex tail, Vertex head) const {
    return std::binary_search(arrows_.begin(), arrows_.end(),
                              Arrow{tail, head});
  }

  bool remove_one(Vertex tail, Vertex head) {
    auto it = std::lower_bound(arrows_.begin(), arrows_.end(),
                               Arrow{tail, head});
    if (it == arrows_.end() || *it != Arrow{tail, head}) return false;
    arrows_.erase(it);
    return true;
  }

  int d_plus(Vertex v) const {
    int d = 0;
    for (const auto& [t, h] : arrows_)
      if (t == v) ++d;
    return d;
  }

  int d_minus(Vertex v) const {
    int d = 0;
    for (const auto& [t, h] : arrows_)
      if (h == v) ++d;
    return d;
  }

  bool empty() const { return arrows_.empty(); }
  int size() const { return static_cast<int>(arrows_.size()); }
  const std::vector<Arrow>& arrows() const { return arrows_; }

  BoundaryEdgeMultiset underlying() const {
    std::vector<Edge> edges;
    for (const auto& [t, h] : arrows_) edges.emplace_back(t, h);
    return BoundaryEdgeMultiset(std::move(edges));
  }

  friend bool operator==(const OrientedBoundary&,
                         const OrientedBoundary&) = default;

 private:
  std::vector<Arrow> arrows_;  // kept sorted
};

// Orientation JSON:
//   {"arcs":[{"tail":t,"head":h,"w":w},...], "S_arrows":[{"tail":t,"head":h},...]}
// Arcs are emitted sorted by (tail, head).
inline std::string serialize_orientation(const WeightedOrientation& d,
                                         const OrientedBoundary& s_arrows) {
  nlohmann::json j;
  nlohmann::json arcs = nlohmann::json::array();
  for (const Arc& a : d.arcs()) {
    nlohmann::json e;
    e["tail"] = a.tail;
    e["head"] = a.head;
    e["w"] = a.weight;
    arcs.push_back(e);
  }
  nlohmann::json arrows = nlohmann::json::array();
  for (const auto& [t, h] : s_arrows.arrows()) {
    nlohmann::json e;
    e["tail"] = t;
    e["head"] = h;
    arrows.push_back(e);
  }
  j["S_arrows"] = arrows;
  j["arcs"] = arcs;
  return j.dump();
}

inline std::pair<WeightedOrientation, OrientedBoundary> parse_orientation(
    const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("arcs") || !j["arcs"].is_array())
    throw parse_error("missing arcs array");
  std::vector<Arc> arcs;
  for (const auto& a : j["arcs"]) {
    if (!a.is_object() || !a.contains("tail") || !a.contains("head"))
      throw parse_error("arc needs tail and head");
    Arc arc;
    arc.tail = a["tail"].get<int>();
    arc.head = a["head"].get<int>();
    arc.weight = a.contains("w") ? a["w"].get<int>() : 1;
    if (arc.tail == arc.head) throw parse_error("arc is a loop");
    if (arc.weight < 1) throw parse_error("arc weight must be positive");
    arcs.push_back(arc);
  }
  OrientedBoundary arrows;
  if (j.contains("S_arrows")) {
    for (const auto& a : j["S_arrows"]) {
      if (!a.is_object() || !a.contains("tail") || !a.contains("head"))
        throw parse_error("S arrow needs tail and head");
      arrows.add(a["tail"].get<int>(), a["head"].get<int>());
    }
  }
  return {WeightedOrientation(std::move(arcs)), arrows};
}

// GraphViz output. Undirected without an orientation; with one, arcs are
// directed and a weight-2 arc is flagged in red.
inline std::string to_dot(const OuterplaneGraph& g) {
  std::ostringstream os;
  os << "graph G {\n  layout=circo;\n";
  for (const Edge& e : g.boundary_edges())
    os << "  " << e.a << " -- " << e.b << ";\n";
  for (const Edge& c : g.chords())
    os << "  " << c.a << " -- " << c.b << " [style=dashed];\n";
  os << "}\n";
  return os.str();
}

inline std::string to_dot(const OuterplaneGraph& g,
                          const WeightedOrientation& d) {
  std::map<Edge, Arc> by_edge;
  for (const Arc& a : d.arcs()) {
    if (!by_edge.emplace(a.source_edge(), a).second)
      throw error("orientation has two arcs on one edge");
  }
  std::ostringstream os;
  os << "digraph D {\n  layout=circo;\n";
  for (const Edge& e : g.edges()) {
    auto it = by_edge.find(e);
    if (it == by_edge.end())
      throw error("orientation misses edge " + to_string(e));
    const Arc& a = it->second;
    os << "  " << a.tail << " -> " << a.head;
    if (a.weight == 2) os << " [color=red, label=\"2\"]";
    if (g.is_chord(e)) os << (a.weight == 2 ? "" : " [style=dashed]");
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ato
