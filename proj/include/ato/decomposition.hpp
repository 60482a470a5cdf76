#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ato/graph.hpp"
#include "ato/recognition.hpp"

namespace ato {

// Weak dual of the inner faces, rooted at the last face the boundary sweep
// completes (the face containing the closing boundary edge). Faces keep
// their sweep order; children are sorted by that order, which makes every
// downstream tie-break deterministic.
struct WeakDualTree {
  std::vector<std::vector<Vertex>> faces;
  int root = -1;
  std::vector<int> parent;                    // -1 at the root
  std::vector<int> depth;
  std::vector<std::vector<int>> children;
  std::vector<std::optional<Edge>> parent_chord;

  bool leaf(int f) const { return children[f].empty(); }
};

inline WeakDualTree weak_dual(const OuterplaneGraph& g) {
  WeakDualTree t;
  t.faces = g.inner_faces();
  const int nf = static_cast<int>(t.faces.size());
  std::map<Edge, std::vector<int>> by_chord;
  for (int f = 0; f < nf; ++f) {
    const auto& face = t.faces[f];
    for (size_t i = 0; i < face.size(); ++i) {
      Edge e(face[i], face[(i + 1) % face.size()]);
      if (g.is_chord(e)) by_chord[e].push_back(f);
    }
  }
  std::vector<std::vector<std::pair<int, Edge>>> adj(nf);
  for (const auto& [chord, fs] : by_chord) {
    if (fs.size() != 2) throw internal_error("chord not on exactly two faces");
    adj[fs[0]].emplace_back(fs[1], chord);
    adj[fs[1]].emplace_back(fs[0], chord);
  }
  t.root = nf - 1;
  t.parent.assign(nf, -1);
  t.depth.assign(nf, 0);
  t.children.assign(nf, {});
  t.parent_chord.assign(nf, std::nullopt);
  std::vector<char> seen(nf, 0);
  std::vector<int> stack{t.root};
  seen[t.root] = 1;
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    std::vector<std::pair<int, Edge>> kids(adj[f].begin(), adj[f].end());
    std::sort(kids.begin(), kids.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [k, chord] : kids) {
      if (seen[k]) continue;
      seen[k] = 1;
      t.parent[k] = f;
      t.parent_chord[k] = chord;
      t.depth[k] = t.depth[f] + 1;
      t.children[f].push_back(k);
      stack.push_back(k);
    }
  }
  for (char s : seen)
    if (!s) throw internal_error("weak dual is not connected");
  return t;
}

// An ear: a path u_1..u_m along one inner face whose interior vertices have
// degree 2 in the host graph; u_1 u_m is the root edge. For chain ears,
// attach is the 1-based index j with root edge v_j v_{j+1} on the chain.
struct Ear {
  std::vector<Vertex> path;
  int attach = 0;

  Edge root_edge() const { return Edge(path.front(), path.back()); }
  Edge first_edge() const { return Edge(path[0], path[1]); }
  int length() const { return static_cast<int>(path.size()); }
};

// Chain: an induced cycle C = v_1..v_s carrying ears on some of its edges
// v_j v_{j+1} (j < s), peeled off against the base edge v_1 v_s. The base
// edge itself is not part of the chain's edge set.
struct EarChain {
  std::vector<Vertex> c;
  std::vector<Ear> ears;
  Edge base{0, 0};

  Vertex v1() const { return c.front(); }
  Vertex vs() const { return c.back(); }
  int s() const { return static_cast<int>(c.size()); }

  // Chain edges in order v_1v_2 .. v_{s-1}v_s (base excluded).
  std::vector<Edge> c_edges() const {
    std::vector<Edge> out;
    for (int i = 0; i + 1 < s(); ++i) out.emplace_back(c[i], c[i + 1]);
    return out;
  }

  // All edges of the chain body: C edges plus every ear path edge.
  std::vector<Edge> all_edges() const {
    std::vector<Edge> out = c_edges();
    for (const Ear& e : ears)
      for (size_t i = 0; i + 1 < e.path.size(); ++i)
        out.emplace_back(e.path[i], e.path[i + 1]);
    return out;
  }

  std::vector<Vertex> all_vertices() const {
    std::set<Vertex> vs(c.begin(), c.end());
    for (const Ear& e : ears) vs.insert(e.path.begin(), e.path.end());
    return {vs.begin(), vs.end()};
  }
};

// Flip the chain end for end: v'_i = v_{s+1-i}. Ears move with their root
// edges (attach j becomes s-j) and their paths reverse.
inline EarChain reverse_chain(const EarChain& f) {
  EarChain r;
  r.c.assign(f.c.rbegin(), f.c.rend());
  r.base = f.base;
  for (const Ear& e : f.ears) {
    Ear re;
    re.path.assign(e.path.rbegin(), e.path.rend());
    re.attach = f.s() - e.attach;
    r.ears.push_back(re);
  }
  std::sort(r.ears.begin(), r.ears.end(),
            [](const Ear& a, const Ear& b) { return a.attach < b.attach; });
  return r;
}

namespace detail {

// Path along a face from one root-edge endpoint to the other, avoiding the
// root edge. The face is cyclic; the root edge appears as a consecutive
// pair in it.
inline std::vector<Vertex> face_path(const std::vector<Vertex>& face,
                                     const Edge& root, Vertex from) {
  const int r = static_cast<int>(face.size());
  int a = -1;
  for (int i = 0; i < r; ++i) {
    Edge e(face[i], face[(i + 1) % r]);
    if (e == root) {
      a = i;
      break;
    }
  }
  if (a < 0) throw internal_error("root edge not on face");
  std::vector<Vertex> path;
  for (int k = 1; k <= r; ++k) path.push_back(face[(a + k) % r]);
  // path runs face[a+1] .. face[a]; flip if the caller wants the other end
  if (path.front() != from) std::reverse(path.begin(), path.end());
  if (path.front() != from) throw internal_error("face path endpoint mismatch");
  return path;
}

}  // namespace detail

// Structural checks for a chain against its host graph; used by tests and
// by the peel itself. Throws internal_error on any violation.
inline void validate_chain(const OuterplaneGraph& g, const EarChain& f) {
  const int s = f.s();
  if (s < 3) throw internal_error("chain too short");
  // C is a cycle of G including the base edge.
  for (const Edge& e : f.c_edges())
    if (!g.has_edge(e)) throw internal_error("chain edge missing in graph");
  if (!(Edge(f.v1(), f.vs()) == f.base))
    throw internal_error("base does not connect chain ends");
  if (!g.has_edge(f.base)) throw internal_error("base edge missing in graph");
  // C is induced: no extra edges between chain vertices.
  std::set<Vertex> cset(f.c.begin(), f.c.end());
  if (static_cast<int>(cset.size()) != s)
    throw internal_error("chain repeats a vertex");
  for (int i = 0; i < s; ++i)
    for (int j = i + 2; j < s; ++j) {
      if (i == 0 && j == s - 1) continue;
      if (g.has_edge(Edge(f.c[i], f.c[j])))
        throw internal_error("chain cycle is not induced");
    }
  int prev_attach = 0;
  std::set<Vertex> interior;
  for (const Ear& e : f.ears) {
    if (e.attach <= prev_attach || e.attach >= s)
      throw internal_error("ear attach order broken");
    prev_attach = e.attach;
    if (e.length() < 3) throw internal_error("ear too short");
    if (e.path.front() != f.c[e.attach - 1] || e.path.back() != f.c[e.attach])
      throw internal_error("ear endpoints disagree with attach edge");
    for (size_t i = 0; i + 1 < e.path.size(); ++i)
      if (!g.has_edge(Edge(e.path[i], e.path[i + 1])))
        throw internal_error("ear edge missing in graph");
    for (size_t i = 1; i + 1 < e.path.size(); ++i) {
      if (g.degree(e.path[i]) != 2)
        throw internal_error("ear interior vertex degree != 2");
      interior.insert(e.path[i]);
    }
  }
  // Interior chain vertices touch chain edges only.
  std::set<Edge> chain_edges;
  for (const Edge& e : f.all_edges()) chain_edges.insert(e);
  for (int i = 1; i + 1 < s; ++i) {
    for (Vertex w : g.neighbors(f.c[i]))
      if (!chain_edges.count(Edge(f.c[i], w)))
        throw internal_error("interior chain vertex reaches outside the chain");
  }
  for (Vertex v : interior)
    if (cset.count(v)) throw internal_error("ear interior intersects chain");
}

// Select the ear chain to peel. The chosen face is the deepest non-leaf of
// the weak dual (its children are then automatically all leaves); ties go
// to the earlier face. Non-root case: the base is the chord to the parent.
// Root case (the dual is a star): the base is the greatest-position C edge
// that roots no ear, and the whole graph collapses to K2 on peeling.
inline EarChain find_ear_chain(const OuterplaneGraph& g) {
  if (g.is_k2()) throw error("IsK2: K2 has no ear chain");
  if (g.chords().empty()) throw error("IsCycle: a bare cycle has no ear chain");
  WeakDualTree t = weak_dual(g);
  const int nf = static_cast<int>(t.faces.size());
  int chosen = -1;
  for (int f = 0; f < nf; ++f) {
    if (t.leaf(f)) continue;
    if (chosen < 0 || t.depth[f] > t.depth[chosen]) chosen = f;
  }
  if (chosen < 0) throw internal_error("no non-leaf face");
  for (int k : t.children[chosen])
    if (!t.leaf(k))
      throw internal_error("chosen face has a non-leaf child");

  const auto& face = t.faces[chosen];
  const int fs = static_cast<int>(face.size());
  std::set<Edge> ear_roots;
  for (int k : t.children[chosen]) ear_roots.insert(*t.parent_chord[k]);

  Edge base{0, 0};
  if (t.parent[chosen] >= 0) {
    base = *t.parent_chord[chosen];
  } else {
    // Compare candidate edges by their sorted boundary-position pair.
    std::optional<std::pair<int, int>> best;
    for (int i = 0; i < fs; ++i) {
      Edge e(face[i], face[(i + 1) % fs]);
      if (ear_roots.count(e)) continue;
      int p = g.pos(e.a), q = g.pos(e.b);
      if (p > q) std::swap(p, q);
      if (!best || std::pair{p, q} > *best) {
        best = {p, q};
        base = e;
      }
    }
    if (!best) throw internal_error("root face has no free edge");
  }

  // Chain order: start right after the base pair in the cyclic face order.
  int bi = -1;
  for (int i = 0; i < fs; ++i)
    if (Edge(face[i], face[(i + 1) % fs]) == base) {
      bi = i;
      break;
    }
  if (bi < 0) throw internal_error("base edge not on chosen face");
  EarChain f;
  f.base = base;
  for (int k = 1; k <= fs; ++k) f.c.push_back(face[(bi + k) % fs]);

  for (int k : t.children[chosen]) {
    Edge root = *t.parent_chord[k];
    int j = -1;
    for (int i = 0; i + 1 < fs; ++i)
      if (Edge(f.c[i], f.c[i + 1]) == root) {
        j = i + 1;
        break;
      }
    if (j < 0) throw internal_error("ear root not on chain");
    Ear ear;
    ear.attach = j;
    ear.path = detail::face_path(t.faces[k], root, f.c[j - 1]);
    f.ears.push_back(ear);
  }
  std::sort(f.ears.begin(), f.ears.end(),
            [](const Ear& a, const Ear& b) { return a.attach < b.attach; });
  validate_chain(g, f);
  return f;
}

// Select an even ear for the bipartite reduction: a leaf face with exactly
// one chord, all of whose non-chord vertices have degree 2. Preference goes
// to the least root-chord position pair, then the earlier face. The default
// direction runs the path from the chord endpoint that follows the chord in
// cyclic face order.
inline Ear find_even_ear(const OuterplaneGraph& g) {
  if (g.is_k2()) throw error("IsK2: K2 has no ear");
  if (!bipartition_of(g)) throw class_error(ClassReason::NotBipartite);
  if (g.chords().empty()) throw error("IsCycle: a bare cycle has no ear");
  WeakDualTree t = weak_dual(g);
  const int nf = static_cast<int>(t.faces.size());
  int pick = -1;
  Edge pick_chord{0, 0};
  std::optional<std::pair<int, int>> best;
  for (int f = 0; f < nf; ++f) {
    const auto& face = t.faces[f];
    const int fs = static_cast<int>(face.size());
    std::vector<Edge> chords_here;
    for (int i = 0; i < fs; ++i) {
      Edge e(face[i], face[(i + 1) % fs]);
      if (g.is_chord(e)) chords_here.push_back(e);
    }
    if (chords_here.size() != 1) continue;
    int p = g.pos(chords_here[0].a), q = g.pos(chords_here[0].b);
    if (p > q) std::swap(p, q);
    if (!best || std::pair{p, q} < *best) {
      best = {p, q};
      pick = f;
      pick_chord = chords_here[0];
    }
  }
  if (pick < 0) throw internal_error("no single-chord leaf face");
  const auto& face = t.faces[pick];
  const int fs = static_cast<int>(face.size());
  if (fs % 2 != 0) throw internal_error("bipartite face with odd length");
  int a = -1;
  for (int i = 0; i < fs; ++i)
    if (Edge(face[i], face[(i + 1) % fs]) == pick_chord) {
      a = i;
      break;
    }
  Ear ear;
  ear.path = detail::face_path(face, pick_chord, face[(a + 1) % fs]);
  for (size_t i = 1; i + 1 < ear.path.size(); ++i)
    if (g.degree(ear.path[i]) != 2)
      throw internal_error("even ear interior vertex degree != 2");
  return ear;
}

struct PeelResult {
  OuterplaneGraph reduced;
  BoundaryEdgeMultiset reduced_s;
};

// Remove the chain body except its two ends; the base edge carries over
// into S'. S splits cleanly: every S edge lies either inside the chain or
// in the reduced graph. S' may hold two parallel copies only when the
// reduction bottoms out at K2 with the base already in S.
inline PeelResult peel_general(const OuterplaneGraph& g,
                               const BoundaryEdgeMultiset& s,
                               const EarChain& f) {
  std::set<Vertex> removed;
  for (Vertex v : f.all_vertices()) removed.insert(v);
  removed.erase(f.v1());
  removed.erase(f.vs());
  OuterplaneGraph reduced = g.induced_without(removed);
  BoundaryEdgeMultiset s2;
  std::set<Edge> chain_edges;
  for (const Edge& e : f.all_edges()) chain_edges.insert(e);
  for (const Edge& e : s.entries()) {
    if (chain_edges.count(e)) continue;
    if (!reduced.has_edge(e))
      throw internal_error("S edge lost by peel: " + to_string(e));
    s2.add(e);
  }
  s2.add(f.base);
  if (s2.count(f.base) > 1 && !reduced.is_k2())
    throw internal_error("parallel S copies outside K2");
  return {std::move(reduced), std::move(s2)};
}

// Bipartite peel of an even ear: drop the interior, push the root edge into
// S'. The root edge is a chord, so it is never already in S.
inline PeelResult peel_bipartite_ear(const OuterplaneGraph& g,
                                     const BoundaryEdgeMultiset& s,
                                     const Ear& ear) {
  std::set<Vertex> removed(ear.path.begin() + 1, ear.path.end() - 1);
  OuterplaneGraph reduced = g.induced_without(removed);
  std::set<Edge> path_edges;
  for (size_t i = 0; i + 1 < ear.path.size(); ++i)
    path_edges.insert(Edge(ear.path[i], ear.path[i + 1]));
  BoundaryEdgeMultiset s2;
  for (const Edge& e : s.entries()) {
    if (path_edges.count(e)) continue;
    if (!reduced.has_edge(e))
      throw internal_error("S edge lost by peel: " + to_string(e));
    s2.add(e);
  }
  if (s.contains(ear.root_edge()))
    throw internal_error("ear root edge cannot be in S");
  s2.add(ear.root_edge());
  return {std::move(reduced), std::move(s2)};
}

// Bipartite peel of a bare even cycle: the "ear" is the whole cycle minus a
// designated edge, and the reduction is K2 on that edge's endpoints. If the
// designated edge is in S, S' holds two parallel copies. The default
// designation is the least-position S edge, or the closing boundary edge
// when S is empty; the orientation layer overrides both ends when it needs
// a specific arrow direction.
inline std::pair<PeelResult, Ear> peel_bipartite_cycle(
    const OuterplaneGraph& g, const BoundaryEdgeMultiset& s,
    std::optional<Edge> designated = std::nullopt,
    std::optional<Vertex> start = std::nullopt) {
  if (!is_cycle(g)) throw error("IsNotCycle");
  const int n = g.n();
  Edge e0{0, 0};
  if (designated) {
    e0 = *designated;
    if (!g.is_boundary_edge(e0))
      throw internal_error("designated edge not on cycle");
  } else if (!s.empty()) {
    int bestp = -1;
    for (const Edge& e : s.entries()) {
      int p = *g.boundary_position_of(e);
      if (bestp < 0 || p < bestp) {
        bestp = p;
        e0 = e;
      }
    }
  } else {
    e0 = g.boundary_edge_at(n - 1);
  }
  int p = *g.boundary_position_of(e0);
  Vertex v1 = start ? *start : g.at(p + 1);
  if (!e0.touches(v1)) throw internal_error("start vertex off designated edge");
  Ear ear;
  // Walk the cycle from v1 away from the designated edge.
  int i = g.pos(v1);
  int dir = (g.at(i + 1) == e0.other(v1)) ? -1 : +1;
  for (int k = 0; k < n; ++k) ear.path.push_back(g.at(i + dir * k));
  if (ear.path.back() != e0.other(v1))
    throw internal_error("cycle walk did not end at designated edge");

  // Non-designated S edges dissolve with the path; the designated edge's
  // own S copy carries over, plus the copy the reduction itself adds.
  BoundaryEdgeMultiset s2;
  if (s.contains(e0)) s2.add(e0);
  s2.add(e0);
  PeelResult r{OuterplaneGraph::k2(e0.a, e0.b), std::move(s2)};
  return {std::move(r), std::move(ear)};
}

}  // namespace ato
