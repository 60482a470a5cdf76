#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "ato/graph.hpp"
#include "ato/recognition.hpp"

namespace ato {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  int below(int bound) {
    return static_cast<int>(eng_() % static_cast<std::uint64_t>(bound));
  }

  bool chance(double p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    return std::bernoulli_distribution(p)(eng_);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Per-index stream for parallel batches: one base seed, one independent
// generator per item.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
}

struct GenOptions {
  int n_lo = 4;
  int n_hi = 12;
  double chord_prob = 0.8;  // chance of subdividing a region further
  double s_prob = 0.25;     // chance of each boundary edge joining S
};

namespace detail {

// Non-crossing chords on boundary positions a..b, closed by the edge or
// chord {a, b}. Splitting at k leaves the face (a, k, b); with chord_prob 1
// the region triangulates completely, n - 3 chords in total.
inline void split_region(Rng& rng, double p, int a, int b,
                         std::vector<Edge>& chords) {
  if (b - a < 2) return;
  if (!rng.chance(p)) return;
  int k = a + 1 + rng.below(b - a - 1);
  if (k - a >= 2) chords.push_back(Edge(a, k));
  if (b - k >= 2) chords.push_back(Edge(k, b));
  split_region(rng, p, a, k, chords);
  split_region(rng, p, k, b, chords);
}

inline BoundaryEdgeMultiset sample_s(Rng& rng, const OuterplaneGraph& g,
                                     double s_prob) {
  BoundaryEdgeMultiset s;
  for (int i = 0; i < g.boundary_edge_count(); ++i)
    if (rng.chance(s_prob)) s.add(g.boundary_edge_at(i));
  // A bare cycle needs S; keep sampling honest by forcing one edge unless
  // the caller asked for empty S outright.
  if (s.empty() && s_prob > 0 && g.chords().empty())
    s.add(g.boundary_edge_at(rng.below(g.boundary_edge_count())));
  return s;
}

}  // namespace detail

// Random 2-connected outerplanar instance on n in [n_lo, n_hi], vertices
// labeled by boundary position. With s_prob = 0 the instance may be an odd
// cycle with empty S, which the classifier rejects; that is the one shape
// this generator is allowed to emit outside the class.
inline Instance gen_general(Rng& rng, const GenOptions& o) {
  if (o.n_lo < 3 || o.n_hi < o.n_lo) throw error("gen_general needs 3 <= n_lo <= n_hi");
  int n = o.n_lo + rng.below(o.n_hi - o.n_lo + 1);
  std::vector<Vertex> boundary(n);
  std::iota(boundary.begin(), boundary.end(), 0);
  std::vector<Edge> chords;
  detail::split_region(rng, o.chord_prob, 0, n - 1, chords);
  OuterplaneGraph g(boundary, chords);
  BoundaryEdgeMultiset s = detail::sample_s(rng, g, o.s_prob);
  ClassCertificate cert = classify_instance(g, s, false);
  if (!cert.accepted() &&
      !(s.empty() && cert.reason == ClassReason::OddCycleWithEmptyS))
    throw internal_error("generator produced an out-of-class instance");
  return Instance{std::move(g), std::move(s)};
}

// Random bipartite (every inner face even) outerplanar instance on even n.
// Faces split along pairs an odd span >= 3 apart, which keeps both sides
// even.
inline Instance gen_bipartite(Rng& rng, const GenOptions& o) {
  int half_lo = (std::max(o.n_lo, 4) + 1) / 2;
  int half_hi = o.n_hi / 2;
  if (half_hi < half_lo) throw error("gen_bipartite needs an even n in range");
  int n = 2 * (half_lo + rng.below(half_hi - half_lo + 1));
  std::vector<Vertex> boundary(n);
  std::iota(boundary.begin(), boundary.end(), 0);

  std::vector<Edge> chords;
  std::vector<std::vector<int>> queue;
  queue.emplace_back(boundary.begin(), boundary.end());
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    std::vector<int> face = queue[qi];  // queue grows; keep a copy
    int m = static_cast<int>(face.size());
    if (m < 6 || !rng.chance(o.chord_prob)) continue;
    std::vector<std::pair<int, int>> cand;
    for (int i = 0; i < m; ++i)
      for (int j = i + 3; j < m; j += 2)
        if (j - i <= m - 3) cand.emplace_back(i, j);
    if (cand.empty()) continue;
    auto [i, j] = cand[rng.below(static_cast<int>(cand.size()))];
    chords.push_back(Edge(face[i], face[j]));
    queue.emplace_back(face.begin() + i, face.begin() + j + 1);
    std::vector<int> rest(face.begin() + j, face.end());
    rest.insert(rest.end(), face.begin(), face.begin() + i + 1);
    queue.push_back(std::move(rest));
  }

  OuterplaneGraph g(boundary, chords);
  BoundaryEdgeMultiset s = detail::sample_s(rng, g, o.s_prob);
  ClassCertificate cert = classify_instance(g, s, true);
  if (!cert.accepted())
    throw internal_error("generator produced an out-of-class instance");
  return Instance{std::move(g), std::move(s)};
}

}  // namespace ato
