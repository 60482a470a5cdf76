#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace ato {

// Error taxonomy. The hierarchy is part of the CLI contract:
// parse_error -> exit 1, class_error (recognition.hpp) -> 2,
// internal_error -> 3, guard_error -> 4.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : error {
  using error::error;
};
struct guard_error : error {
  using error::error;
};
struct internal_error : error {
  using error::error;
};

using Vertex = int;

// Undirected edge, normalized so a <= b.
struct Edge {
  Vertex a;
  Vertex b;
  Edge(Vertex x, Vertex y) : a(std::min(x, y)), b(std::max(x, y)) {}
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
  bool touches(Vertex v) const { return a == v || b == v; }
  Vertex other(Vertex v) const { return v == a ? b : a; }
};

inline std::string to_string(const Edge& e) {
  return std::to_string(e.a) + "-" + std::to_string(e.b);
}

// A 2-connected outerplane graph: Hamiltonian boundary cycle plus
// pairwise non-crossing chords. n == 2 encodes K2 (single edge, no chords).
//
// Boundary entries are vertex labels. Freshly parsed graphs use dense labels
// 0..n-1; graphs produced by peeling keep the labels of the parent graph, so
// every lookup goes through the position map instead of assuming
// label == position.
class OuterplaneGraph {
 public:
  OuterplaneGraph() = default;

  OuterplaneGraph(std::vector<Vertex> boundary, std::vector<Edge> chords)
      : boundary_(std::move(boundary)), chords_(std::move(chords)) {
    validate();
    std::sort(chords_.begin(), chords_.end());
    index();
  }

  static OuterplaneGraph k2(Vertex a, Vertex b) {
    return OuterplaneGraph({std::min(a, b), std::max(a, b)}, {});
  }

  int n() const { return static_cast<int>(boundary_.size()); }
  bool is_k2() const { return n() == 2; }
  const std::vector<Vertex>& boundary() const { return boundary_; }
  const std::vector<Edge>& chords() const { return chords_; }

  bool has_vertex(Vertex v) const { return pos_.count(v) != 0; }

  // Boundary position of a label. Positions are 0-based indices into
  // boundary(), valid only for this graph instance.
  int pos(Vertex v) const {
    auto it = pos_.find(v);
    if (it == pos_.end())
      throw internal_error("unknown vertex label " + std::to_string(v));
    return it->second;
  }

  Vertex at(int position) const {
    return boundary_[((position % n()) + n()) % n()];
  }

  // K2 has a single boundary edge, not two.
  int boundary_edge_count() const { return is_k2() ? 1 : n(); }

  Edge boundary_edge_at(int position) const {
    if (position < 0 || position >= boundary_edge_count())
      throw internal_error("boundary edge position out of range");
    return Edge(boundary_[position], at(position + 1));
  }

  std::optional<int> boundary_position_of(const Edge& e) const {
    if (!has_vertex(e.a) || !has_vertex(e.b)) return std::nullopt;
    int i = pos(e.a), j = pos(e.b);
    if (is_k2()) return 0;
    if ((i + 1) % n() == j) return i;
    if ((j + 1) % n() == i) return j;
    return std::nullopt;
  }

  bool is_boundary_edge(const Edge& e) const {
    return boundary_position_of(e).has_value();
  }

  bool is_chord(const Edge& e) const {
    return std::binary_search(chords_.begin(), chords_.end(), e);
  }

  bool has_edge(const Edge& e) const {
    return is_boundary_edge(e) || is_chord(e);
  }

  std::vector<Edge> boundary_edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < boundary_edge_count(); ++i)
      out.push_back(boundary_edge_at(i));
    return out;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out = boundary_edges();
    out.insert(out.end(), chords_.begin(), chords_.end());
    return out;
  }

  int edge_count() const {
    return boundary_edge_count() + static_cast<int>(chords_.size());
  }

  int degree(Vertex v) const {
    if (is_k2()) return 1;
    int d = 2;
    for (const Edge& c : chords_)
      if (c.touches(v)) ++d;
    return d;
  }

  std::vector<Vertex> neighbors(Vertex v) const {
    std::vector<Vertex> out;
    if (is_k2()) {
      out.push_back(boundary_[pos(v) == 0 ? 1 : 0]);
      return out;
    }
    int i = pos(v);
    out.push_back(at(i - 1));
    out.push_back(at(i + 1));
    for (const Edge& c : chords_)
      if (c.touches(v)) out.push_back(c.other(v));
    std::sort(out.begin(), out.end());
    return out;
  }

  // Inner faces by a single sweep along the boundary. A stack of open paths
  // is maintained; a chord opening at position k pushes a new path and a
  // chord closing at k completes the top of the stack as a face. Faces are
  // emitted in completion order, each listed in increasing boundary
  // position, and the final face (the one containing the closing boundary
  // edge between positions n-1 and 0) comes out last. Downstream
  // decomposition code relies on exactly this order.
  std::vector<std::vector<Vertex>> inner_faces() const {
    if (is_k2()) throw guard_error("inner_faces: K2 has no inner faces");
    const int nn = n();
    std::vector<std::vector<int>> open_at(nn), close_at(nn);
    for (const Edge& c : chords_) {
      int i = pos(c.a), j = pos(c.b);
      if (i > j) std::swap(i, j);
      open_at[i].push_back(j);
      close_at[j].push_back(i);
    }
    for (auto& v : open_at) std::sort(v.rbegin(), v.rend());
    for (auto& v : close_at) std::sort(v.rbegin(), v.rend());

    std::vector<std::vector<int>> faces;
    std::vector<std::vector<int>> stack;
    stack.emplace_back();
    for (int k = 0; k < nn; ++k) {
      for (int start : close_at[k]) {
        (void)start;  // closes are ordered inner-first by the sort above
        stack.back().push_back(k);
        faces.push_back(stack.back());
        stack.pop_back();
        if (stack.empty()) throw internal_error("face sweep underflow");
      }
      stack.back().push_back(k);
      for (int far : open_at[k]) {
        (void)far;
        stack.push_back({k});
      }
    }
    if (stack.size() != 1) throw internal_error("face sweep leftover paths");
    faces.push_back(stack.back());

    std::vector<std::vector<Vertex>> out;
    for (const auto& f : faces) {
      if (f.size() < 3) throw internal_error("degenerate face");
      std::vector<Vertex> labels;
      for (int p : f) labels.push_back(boundary_[p]);
      out.push_back(std::move(labels));
    }
    return out;
  }

  // Same labels, boundary rotated and possibly reflected to the
  // lexicographically least sequence. Parse/serialize round-trips through
  // this form byte for byte.
  OuterplaneGraph canonicalized() const {
    std::vector<Vertex> best;
    const int nn = n();
    for (int dir : {+1, -1})
      for (int s = 0; s < nn; ++s) {
        std::vector<Vertex> cand;
        cand.reserve(nn);
        for (int k = 0; k < nn; ++k) cand.push_back(at(s + dir * k));
        if (best.empty() || cand < best) best = std::move(cand);
      }
    return OuterplaneGraph(best, chords_);
  }

  // Remove a vertex set; chords whose endpoints become boundary-adjacent in
  // the remainder are reclassified as boundary edges. This is exactly what a
  // peel needs: the base edge of the removed part turns into a boundary edge
  // of the reduced graph.
  OuterplaneGraph induced_without(const std::set<Vertex>& removed) const {
    std::vector<Vertex> nb;
    for (Vertex v : boundary_)
      if (!removed.count(v)) nb.push_back(v);
    if (nb.size() < 2) throw internal_error("induced_without: too few vertices");
    std::unordered_map<Vertex, int> np;
    for (int i = 0; i < static_cast<int>(nb.size()); ++i) np[nb[i]] = i;
    const int m = static_cast<int>(nb.size());
    std::vector<Edge> nc;
    for (const Edge& c : chords_) {
      if (removed.count(c.a) || removed.count(c.b)) continue;
      int i = np[c.a], j = np[c.b];
      int d = std::abs(i - j);
      bool adjacent = (m == 2) || d == 1 || d == m - 1;
      if (!adjacent) nc.push_back(c);
    }
    return OuterplaneGraph(nb, nc);
  }

  std::string describe() const {
    std::ostringstream os;
    os << "n=" << n() << " boundary=[";
    for (int i = 0; i < n(); ++i) os << (i ? "," : "") << boundary_[i];
    os << "] chords={";
    for (size_t i = 0; i < chords_.size(); ++i)
      os << (i ? "," : "") << to_string(chords_[i]);
    os << "}";
    return os.str();
  }

 private:
  void validate() {
    if (boundary_.size() < 2) throw parse_error("boundary needs >= 2 vertices");
    std::set<Vertex> seen;
    for (Vertex v : boundary_) {
      if (v < 0) throw parse_error("negative vertex label");
      if (!seen.insert(v).second)
        throw parse_error("duplicate vertex on boundary");
    }
    if (boundary_.size() == 2) {
      if (!chords_.empty()) throw parse_error("K2 admits no chords");
      return;
    }
    std::unordered_map<Vertex, int> p;
    for (int i = 0; i < static_cast<int>(boundary_.size()); ++i)
      p[boundary_[i]] = i;
    const int nn = static_cast<int>(boundary_.size());
    std::set<Edge> cset;
    std::vector<std::pair<int, int>> spans;
    for (const Edge& c : chords_) {
      if (c.a == c.b) throw parse_error("LoopEdge: chord is a loop");
      if (!p.count(c.a) || !p.count(c.b))
        throw parse_error("chord endpoint not on boundary");
      if (!cset.insert(c).second)
        throw parse_error("DuplicateChord: " + to_string(c));
      int i = p[c.a], j = p[c.b];
      if (i > j) std::swap(i, j);
      if (j - i == 1 || (i == 0 && j == nn - 1))
        throw parse_error("ChordIsBoundaryEdge: " + to_string(c));
      spans.emplace_back(i, j);
    }
    // Two chords cross iff their position spans interleave.
    for (size_t x = 0; x < spans.size(); ++x)
      for (size_t y = x + 1; y < spans.size(); ++y) {
        auto [a, b] = spans[x];
        auto [c, d] = spans[y];
        bool cross = (a < c && c < b && b < d) || (c < a && a < d && d < b);
        if (cross)
          throw parse_error("CrossingChords: " + to_string(chords_[x]) +
                            " and " + to_string(chords_[y]));
      }
  }

  void index() {
    pos_.clear();
    for (int i = 0; i < static_cast<int>(boundary_.size()); ++i)
      pos_[boundary_[i]] = i;
  }

  std::vector<Vertex> boundary_;
  std::vector<Edge> chords_;
  std::unordered_map<Vertex, int> pos_;
};

// Multiset of boundary edges. Multiplicity 2 is legal only on K2, which the
// owner of the set enforces; the container itself just stores edges.
class BoundaryEdgeMultiset {
 public:
  BoundaryEdgeMultiset() = default;
  explicit BoundaryEdgeMultiset(std::vector<Edge> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
  }

  void add(const Edge& e) {
    items_.insert(std::upper_bound(items_.begin(), items_.end(), e), e);
  }

  int count(const Edge& e) const {
    auto r = std::equal_range(items_.begin(), items_.end(), e);
    return static_cast<int>(r.second - r.first);
  }

  bool contains(const Edge& e) const { return count(e) > 0; }

  bool remove_one(const Edge& e) {
    auto it = std::lower_bound(items_.begin(), items_.end(), e);
    if (it == items_.end() || !(*it == e)) return false;
    items_.erase(it);
    return true;
  }

  bool empty() const { return items_.empty(); }
  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<Edge>& entries() const { return items_; }

  friend bool operator==(const BoundaryEdgeMultiset&,
                         const BoundaryEdgeMultiset&) = default;

 private:
  std::vector<Edge> items_;  // kept sorted
};

struct Instance {
  OuterplaneGraph graph;
  BoundaryEdgeMultiset s;
};

// Instance JSON:
//   {"boundary":[...], "chords":[[a,b],...], "S":[pos,...]}
// boundary is the outer cycle in order; with strict=true the labels must be
// exactly 0..n-1. S entries are boundary positions (bare ints or singleton
// arrays); position i names the edge boundary[i]-boundary[i+1 mod n].
// Repeated S positions are allowed only for n == 2.
inline Instance parse_graph(const std::string& text, bool strict = true) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("boundary") || !j["boundary"].is_array())
    throw parse_error("missing boundary array");
  std::vector<Vertex> boundary;
  for (const auto& v : j["boundary"]) {
    if (!v.is_number_integer()) throw parse_error("boundary entry not an int");
    boundary.push_back(v.get<int>());
  }
  if (strict) {
    std::set<Vertex> want;
    for (int i = 0; i < static_cast<int>(boundary.size()); ++i) want.insert(i);
    if (std::set<Vertex>(boundary.begin(), boundary.end()) != want)
      throw parse_error("BoundaryNotPermutation: labels must be 0..n-1");
  }
  std::vector<Edge> chords;
  if (j.contains("chords")) {
    if (!j["chords"].is_array()) throw parse_error("chords must be an array");
    for (const auto& c : j["chords"]) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer())
        throw parse_error("chord entry must be a pair of ints");
      chords.emplace_back(c[0].get<int>(), c[1].get<int>());
    }
  }
  OuterplaneGraph g(boundary, chords);

  BoundaryEdgeMultiset s;
  if (j.contains("S")) {
    if (!j["S"].is_array()) throw parse_error("S must be an array");
    std::map<int, int> mult;
    for (const auto& entry : j["S"]) {
      int posv;
      if (entry.is_number_integer()) {
        posv = entry.get<int>();
      } else if (entry.is_array() && entry.size() == 1 &&
                 entry[0].is_number_integer()) {
        posv = entry[0].get<int>();
      } else {
        throw parse_error("S entry must be a position int or [int]");
      }
      if (posv < 0 || posv >= g.boundary_edge_count())
        throw parse_error("S position out of range: " + std::to_string(posv));
      mult[posv] += 1;
    }
    for (auto [posv, m] : mult) {
      if (m > 1 && !g.is_k2())
        throw parse_error("repeated S entry allowed only for n=2");
      if (m > 2) throw parse_error("S multiplicity above 2");
      for (int k = 0; k < m; ++k) s.add(g.boundary_edge_at(posv));
    }
  }
  return Instance{std::move(g), std::move(s)};
}

inline std::string serialize_instance(const OuterplaneGraph& g,
                                      const BoundaryEdgeMultiset& s) {
  nlohmann::json j;  // nlohmann sorts keys: S < boundary < chords
  if (!s.empty()) {
    std::vector<int> positions;
    for (const Edge& e : s.entries()) {
      auto p = g.boundary_position_of(e);
      if (!p) throw internal_error("S edge not on boundary: " + to_string(e));
      positions.push_back(*p);
    }
    std::sort(positions.begin(), positions.end());
    j["S"] = positions;
  }
  j["boundary"] = g.boundary();
  nlohmann::json ch = nlohmann::json::array();
  for (const Edge& c : g.chords()) ch.push_back({c.a, c.b});
  j["chords"] = ch;
  return j.dump();
}

// Rotation/reflection invariant key of the boundary-position chord pattern.
// Used to deduplicate generated graphs up to relabeling.
inline std::string shape_key(const OuterplaneGraph& g) {
  const int nn = g.n();
  if (g.is_k2()) return "K2";
  std::vector<std::pair<int, int>> best;
  for (int dir : {+1, -1})
    for (int s = 0; s < nn; ++s) {
      std::vector<std::pair<int, int>> cand;
      std::unordered_map<Vertex, int> rp;
      for (int k = 0; k < nn; ++k) rp[g.at(s + dir * k)] = k;
      for (const Edge& c : g.chords()) {
        int i = rp[c.a], j = rp[c.b];
        if (i > j) std::swap(i, j);
        cand.emplace_back(i, j);
      }
      std::sort(cand.begin(), cand.end());
      if ((s == 0 && dir == 1) || cand < best) best = std::move(cand);
    }
  std::ostringstream os;
  os << nn << ":";
  for (auto [i, j] : best) os << i << "-" << j << ";";
  return os.str();
}

}  // namespace ato
