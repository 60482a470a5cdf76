#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ato/arcs.hpp"
#include "ato/graph.hpp"
#include "ato/recognition.hpp"

namespace ato {

struct EulerianCensus {
  std::int64_t even_count = 0;  // spanning Eulerian sub-digraphs with even arc count
  std::int64_t odd_count = 0;
  std::int64_t total = 0;
  std::int64_t diff = 0;  // even_count - odd_count

  friend bool operator==(const EulerianCensus&, const EulerianCensus&) = default;
};

// Census of Eulerian sub-digraphs: arc subsets H whose weighted in-degree
// equals the weighted out-degree at every vertex. The empty set always
// qualifies. Parity is by |H|, the number of arcs, not by weight.
//
// Meet in the middle: subsets of each arc half are bucketed by their vertex
// balance vector, then opposite buckets are paired. 2^(m/2) buckets keep
// m = 30 comfortably in memory; anything larger trips the guard.
inline EulerianCensus eulerian_census(const WeightedOrientation& d) {
  const int m = d.arc_count();
  if (m > 30) throw guard_error("TooManyArcs: census limited to 30 arcs");

  std::vector<Vertex> verts = d.vertices();
  std::unordered_map<Vertex, int> idx;
  for (int i = 0; i < static_cast<int>(verts.size()); ++i) idx[verts[i]] = i;
  const int nv = static_cast<int>(verts.size());

  const int h1 = m / 2;
  const auto& arcs = d.arcs();

  // Balance entries stay within +-(sum of weights), far inside int16.
  auto key_of = [&](const std::vector<std::int16_t>& bal) {
    return std::string(reinterpret_cast<const char*>(bal.data()),
                       bal.size() * sizeof(std::int16_t));
  };

  std::unordered_map<std::string, std::array<std::int64_t, 2>> left;
  for (std::uint32_t mask = 0; mask < (1u << h1); ++mask) {
    std::vector<std::int16_t> bal(nv, 0);
    int bits = 0;
    for (int i = 0; i < h1; ++i)
      if (mask >> i & 1) {
        ++bits;
        bal[idx[arcs[i].tail]] += static_cast<std::int16_t>(arcs[i].weight);
        bal[idx[arcs[i].head]] -= static_cast<std::int16_t>(arcs[i].weight);
      }
    left[key_of(bal)][bits & 1] += 1;
  }

  EulerianCensus c;
  const int h2 = m - h1;
  for (std::uint32_t mask = 0; mask < (1u << h2); ++mask) {
    std::vector<std::int16_t> bal(nv, 0);
    int bits = 0;
    for (int i = 0; i < h2; ++i)
      if (mask >> i & 1) {
        ++bits;
        const Arc& a = arcs[h1 + i];
        // Negated so that a matching left bucket cancels it exactly.
        bal[idx[a.tail]] -= static_cast<std::int16_t>(a.weight);
        bal[idx[a.head]] += static_cast<std::int16_t>(a.weight);
      }
    auto it = left.find(key_of(bal));
    if (it == left.end()) continue;
    const auto& cnt = it->second;
    if (bits & 1) {
      c.odd_count += cnt[0];
      c.even_count += cnt[1];
    } else {
      c.even_count += cnt[0];
      c.odd_count += cnt[1];
    }
  }
  c.total = c.even_count + c.odd_count;
  c.diff = c.even_count - c.odd_count;
  return c;
}

inline bool is_AT(const WeightedOrientation& d) {
  return eulerian_census(d).diff != 0;
}

// Coefficient of prod_v x_v^{d+(v)} in prod_{(u,v) arc} (x_u - x_v),
// expanded term by term with pruning against the target exponent vector.
// Unit weights only; its absolute value must agree with |census diff|,
// which the tests pin down.
inline std::int64_t at_poly_coefficient(const WeightedOrientation& d) {
  if (!d.all_unit_weight())
    throw error("at_poly_coefficient expects unit weights");
  const int m = d.arc_count();
  if (m > 16) throw guard_error("TooManyArcs: polynomial limited to 16 arcs");

  std::vector<Vertex> verts = d.vertices();
  std::unordered_map<Vertex, int> idx;
  for (int i = 0; i < static_cast<int>(verts.size()); ++i) idx[verts[i]] = i;
  const int nv = static_cast<int>(verts.size());

  std::vector<int> target(nv, 0);
  for (const Arc& a : d.arcs()) target[idx[a.tail]] += 1;

  const auto& arcs = d.arcs();
  std::vector<int> expo(nv, 0);
  std::int64_t coef = 0;
  auto dfs = [&](auto&& self, int i, int sign) -> void {
    if (i == m) {
      coef += sign;  // expo == target holds by the pruning below
      return;
    }
    int t = idx[arcs[i].tail], h = idx[arcs[i].head];
    if (expo[t] < target[t]) {
      ++expo[t];
      self(self, i + 1, sign);
      --expo[t];
    }
    if (expo[h] < target[h]) {
      ++expo[h];
      self(self, i + 1, -sign);
      --expo[h];
    }
  };
  dfs(dfs, 0, 1);
  return coef;
}

// Every orientation of a bipartite graph is expected to have zero odd-count;
// this checks a single orientation and insists the host graph is bipartite.
inline bool check_bipartite_all_even(const WeightedOrientation& d,
                                     const RawGraph& g) {
  std::vector<int> color(g.n, -1);
  for (int s = 0; s < g.n; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const Edge& e : g.edges) {
        if (!e.touches(v)) continue;
        int w = e.other(v);
        if (color[w] < 0) {
          color[w] = color[v] ^ 1;
          stack.push_back(w);
        } else if (color[w] == color[v]) {
          throw error("check_bipartite_all_even: graph is not bipartite");
        }
      }
    }
  }
  return eulerian_census(d).odd_count == 0;
}

enum class Winner { Lister, Painter };

struct GameResult {
  Winner winner = Winner::Lister;
};

namespace detail {

// State key: uncolored mask in the low byte, then one nibble of remaining
// tokens per vertex. Colored vertices are zeroed so equal positions collide.
inline std::uint64_t paint_key(unsigned mask, const std::array<int, 8>& tok,
                               int n) {
  std::uint64_t k = mask;
  for (int v = 0; v < n; ++v) {
    std::uint64_t t = (mask >> v & 1) ? static_cast<std::uint64_t>(tok[v]) : 0;
    k |= t << (8 + 4 * v);
  }
  return k;
}

}  // namespace detail

// Exact minimax solve of the token painting game. Each round the Lister
// takes one token from every vertex of a chosen uncolored set U, the
// Painter colors an independent subset of U, and the Lister wins as soon as
// an uncolored vertex is out of tokens. The Painter only ever needs
// maximal independent subsets of U: coloring more vertices never hurts.
inline GameResult solve_paint_game(const RawGraph& g,
                                   const std::vector<int>& f) {
  if (g.n > 8) throw guard_error("StateSpaceTooLarge: paint solver capped at n=8");
  if (static_cast<int>(f.size()) != g.n)
    throw error("demand vector size mismatch");
  for (int x : f)
    if (x < 0 || x > 5)
      throw guard_error("StateSpaceTooLarge: tokens capped at 5");

  std::array<unsigned, 8> adj{};
  for (const Edge& e : g.edges) {
    adj[e.a] |= 1u << e.b;
    adj[e.b] |= 1u << e.a;
  }

  // Maximal independent subsets of U, cached per U.
  std::vector<std::vector<unsigned>> mis_cache(1u << g.n);
  std::vector<char> mis_done(1u << g.n, 0);
  auto maximal_independent = [&](unsigned u) -> const std::vector<unsigned>& {
    if (mis_done[u]) return mis_cache[u];
    std::vector<unsigned> out;
    for (unsigned i = u;; i = (i - 1) & u) {
      bool indep = true;
      for (int v = 0; v < g.n && indep; ++v)
        if (i >> v & 1)
          if (i & adj[v]) indep = false;
      if (indep && i) {
        bool maximal = true;
        unsigned rest = u & ~i;
        for (int v = 0; v < g.n && maximal; ++v)
          if (rest >> v & 1)
            if (!(i & adj[v])) maximal = false;
        if (maximal) out.push_back(i);
      }
      if (i == 0) break;
    }
    mis_cache[u] = std::move(out);
    mis_done[u] = 1;
    return mis_cache[u];
  };

  std::unordered_map<std::uint64_t, bool> memo;
  std::array<int, 8> tok{};
  for (int v = 0; v < g.n; ++v) tok[v] = f[v];

  auto painter_wins = [&](auto&& self, unsigned mask) -> bool {
    if (mask == 0) return true;
    for (int v = 0; v < g.n; ++v)
      if ((mask >> v & 1) && tok[v] == 0) return false;
    std::uint64_t key = detail::paint_key(mask, tok, g.n);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool win = true;
    for (unsigned u = mask; u && win; u = (u - 1) & mask) {
      for (int v = 0; v < g.n; ++v)
        if (u >> v & 1) --tok[v];
      // Vertices of U dropping to zero must all be colored now.
      unsigned zero = 0;
      for (int v = 0; v < g.n; ++v)
        if ((u >> v & 1) && tok[v] == 0) zero |= 1u << v;
      bool saved = false;
      for (unsigned i : maximal_independent(u)) {
        if ((zero & ~i) != 0) continue;
        if (self(self, mask & ~i)) {
          saved = true;
          break;
        }
      }
      for (int v = 0; v < g.n; ++v)
        if (u >> v & 1) ++tok[v];
      if (!saved) win = false;
    }
    memo[key] = win;
    return win;
  };

  unsigned full = (1u << g.n) - 1;
  GameResult r;
  r.winner = painter_wins(painter_wins, full) ? Winner::Painter : Winner::Lister;
  return r;
}

// Backtracking list coloring. Returns a proper coloring from the lists, or
// nullopt. The list-size product is capped to keep the search honest.
inline std::optional<std::vector<int>> check_L_coloring(
    const RawGraph& g, const std::vector<std::vector<int>>& lists) {
  if (static_cast<int>(lists.size()) != g.n)
    throw error("list count mismatch");
  double product = 1;
  for (const auto& l : lists) {
    product *= std::max<std::size_t>(l.size(), 1);
    if (product > 1e6)
      throw guard_error("StateSpaceTooLarge: list product above 1e6");
  }
  std::vector<std::vector<int>> adj(g.n);
  for (const Edge& e : g.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<int> color(g.n, INT32_MIN);
  auto dfs = [&](auto&& self, int v) -> bool {
    if (v == g.n) return true;
    for (int c : lists[v]) {
      bool ok = true;
      for (int w : adj[v])
        if (w < v && color[w] == c) ok = false;
      if (!ok) continue;
      color[v] = c;
      if (self(self, v + 1)) return true;
    }
    color[v] = INT32_MIN;
    return false;
  };
  if (!dfs(dfs, 0)) return std::nullopt;
  return color;
}

}  // namespace ato
