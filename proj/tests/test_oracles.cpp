#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "ato/oracles.hpp"

using namespace ato;

namespace {

WeightedOrientation mk(std::vector<Arc> arcs) {
  return WeightedOrientation(std::move(arcs));
}

// Independent census: enumerate every arc subset and test weighted balance
// at each vertex directly. Parity is by arc count, not weight.
EulerianCensus naive_census(const WeightedOrientation& d) {
  const auto& arcs = d.arcs();
  const int m = static_cast<int>(arcs.size());
  REQUIRE(m <= 20);
  EulerianCensus c;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::map<Vertex, std::int64_t> bal;
    int picked = 0;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        ++picked;
        bal[arcs[i].tail] += arcs[i].weight;
        bal[arcs[i].head] -= arcs[i].weight;
      }
    bool ok = true;
    for (const auto& [v, x] : bal) ok &= x == 0;
    if (!ok) continue;
    ++(picked % 2 == 0 ? c.even_count : c.odd_count);
  }
  c.total = c.even_count + c.odd_count;
  c.diff = c.even_count - c.odd_count;
  return c;
}

WeightedOrientation directed_cycle(int n) {
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i) arcs.push_back({i, (i + 1) % n, 1});
  return mk(std::move(arcs));
}

}  // namespace

TEST_CASE("census of tiny digraphs") {
  SECTION("single arc") {
    EulerianCensus c = eulerian_census(mk({{0, 1, 1}}));
    CHECK(c.even_count == 1);
    CHECK(c.odd_count == 0);
    CHECK(c.total == 1);
    CHECK(c.diff == 1);
  }
  SECTION("directed triangle") {
    EulerianCensus c = eulerian_census(directed_cycle(3));
    CHECK(c.even_count == 1);
    CHECK(c.odd_count == 1);
    CHECK(c.diff == 0);
    CHECK_FALSE(is_AT(directed_cycle(3)));
  }
  SECTION("transitive triangle") {
    EulerianCensus c = eulerian_census(mk({{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}));
    CHECK(c.even_count == 1);
    CHECK(c.odd_count == 0);
    CHECK(c.diff == 1);
  }
  SECTION("directed 4-cycle") {
    EulerianCensus c = eulerian_census(directed_cycle(4));
    CHECK(c.even_count == 2);
    CHECK(c.odd_count == 0);
    CHECK(c.diff == 2);
  }
  SECTION("weights matter: doubled digon") {
    // weight 2 against weight 1 cannot balance
    EulerianCensus c = eulerian_census(mk({{0, 1, 2}, {1, 0, 1}}));
    CHECK(c.even_count == 1);
    CHECK(c.odd_count == 0);
    CHECK(c.total == 1);
  }
}

TEST_CASE("census of fixture orientations") {
  SECTION("one-chord hexagon") {
    EulerianCensus c = eulerian_census(mk({{4, 5, 1}, {5, 0, 1}, {0, 3, 1},
                                           {3, 4, 1}, {0, 1, 1}, {1, 2, 1},
                                           {2, 3, 1}}));
    CHECK(c.even_count == 3);
    CHECK(c.odd_count == 0);
    CHECK(c.diff == 3);
  }
  SECTION("nested-chords 7-gon") {
    EulerianCensus c = eulerian_census(
        mk({{4, 5, 1}, {5, 6, 1}, {6, 0, 1}, {4, 0, 1}, {0, 1, 1},
            {1, 3, 1}, {3, 4, 1}, {1, 2, 1}, {2, 3, 1}}));
    CHECK(c.even_count == 3);
    CHECK(c.odd_count == 2);
    CHECK(c.diff == 1);
  }
  SECTION("chorded square") {
    EulerianCensus c = eulerian_census(
        mk({{2, 3, 1}, {3, 0, 1}, {0, 2, 1}, {0, 1, 1}, {1, 2, 1}}));
    CHECK(c.even_count == 2);
    CHECK(c.odd_count == 1);
    CHECK(c.diff == 1);
  }
  SECTION("near-directed square") {
    EulerianCensus c = eulerian_census(
        mk({{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}}));
    CHECK(c.even_count == 1);
    CHECK(c.odd_count == 0);
    CHECK(c.diff == 1);
  }
}

TEST_CASE("directed odd cycles are never Alon-Tarsi") {
  for (int n = 3; n <= 13; n += 2) {
    EulerianCensus c = eulerian_census(directed_cycle(n));
    CHECK(c.diff == 0);
  }
  for (int n = 4; n <= 12; n += 2) CHECK(eulerian_census(directed_cycle(n)).diff == 2);
}

TEST_CASE("census agrees with subset enumeration") {
  std::vector<WeightedOrientation> samples = {
      directed_cycle(5),
      mk({{4, 5, 1}, {5, 0, 1}, {0, 3, 1}, {3, 4, 1}, {0, 1, 1}, {1, 2, 1}, {2, 3, 1}}),
      mk({{1, 2, 1}, {5, 2, 1}, {5, 0, 1}, {0, 1, 1}, {2, 3, 2}, {3, 4, 1}, {4, 5, 1}}),
      mk({{0, 1, 2}, {1, 2, 1}, {2, 0, 1}, {2, 3, 1}, {3, 0, 2}}),
  };
  for (const auto& d : samples) {
    EulerianCensus fast = eulerian_census(d);
    EulerianCensus slow = naive_census(d);
    CHECK(fast == slow);
  }
}

TEST_CASE("census guard") {
  std::vector<Arc> arcs;
  for (int i = 0; i < 31; ++i) arcs.push_back({i, i + 1, 1});
  CHECK_THROWS_AS(eulerian_census(mk(std::move(arcs))), guard_error);
}

TEST_CASE("polynomial coefficient matches the census difference") {
  std::vector<WeightedOrientation> samples = {
      directed_cycle(3),
      directed_cycle(4),
      mk({{2, 3, 1}, {3, 0, 1}, {0, 2, 1}, {0, 1, 1}, {1, 2, 1}}),
      mk({{4, 5, 1}, {5, 0, 1}, {0, 3, 1}, {3, 4, 1}, {0, 1, 1}, {1, 2, 1}, {2, 3, 1}}),
      mk({{4, 5, 1}, {5, 6, 1}, {6, 0, 1}, {4, 0, 1}, {0, 1, 1}, {1, 3, 1},
          {3, 4, 1}, {1, 2, 1}, {2, 3, 1}}),
  };
  for (const auto& d : samples) {
    std::int64_t coef = at_poly_coefficient(d);
    EulerianCensus c = eulerian_census(d);
    CHECK(std::abs(coef) == std::abs(c.diff));
  }
  CHECK(at_poly_coefficient(directed_cycle(3)) == 0);
  CHECK(at_poly_coefficient(mk({{2, 3, 1}, {3, 0, 1}, {0, 2, 1}, {0, 1, 1},
                                {1, 2, 1}})) == 1);
  // weighted arcs are outside the polynomial's domain
  CHECK_THROWS_AS(at_poly_coefficient(mk({{0, 1, 2}})), error);
  std::vector<Arc> big;
  for (int i = 0; i < 17; ++i) big.push_back({i, i + 1, 1});
  CHECK_THROWS_AS(at_poly_coefficient(mk(std::move(big))), guard_error);
}

TEST_CASE("bipartite orientations have even Eulerian parts only") {
  RawGraph f6{6, {Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(3, 4), Edge(4, 5),
                  Edge(5, 0), Edge(0, 3)}};
  WeightedOrientation d = mk({{3, 0, 1}, {0, 5, 1}, {5, 4, 1}, {4, 3, 1},
                              {0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
  CHECK(check_bipartite_all_even(d, f6));
  EulerianCensus c = eulerian_census(d);
  CHECK(c.even_count == 3);
  CHECK(c.odd_count == 0);
  RawGraph c3{3, {Edge(0, 1), Edge(1, 2), Edge(0, 2)}};
  CHECK_THROWS_AS(check_bipartite_all_even(directed_cycle(3), c3), error);
}

TEST_CASE("painting game solver") {
  SECTION("single edge") {
    RawGraph k2{2, {Edge(0, 1)}};
    CHECK(solve_paint_game(k2, {1, 1}).winner == Winner::Lister);
    CHECK(solve_paint_game(k2, {1, 2}).winner == Winner::Painter);
    CHECK(solve_paint_game(k2, {2, 1}).winner == Winner::Painter);
  }
  SECTION("even cycle with two tokens each") {
    RawGraph c4{4, {Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(3, 0)}};
    CHECK(solve_paint_game(c4, {2, 2, 2, 2}).winner == Winner::Painter);
  }
  SECTION("odd cycle needs three somewhere") {
    RawGraph c3{3, {Edge(0, 1), Edge(1, 2), Edge(0, 2)}};
    CHECK(solve_paint_game(c3, {2, 2, 2}).winner == Winner::Lister);
    CHECK(solve_paint_game(c3, {3, 2, 2}).winner == Winner::Painter);
  }
  SECTION("guards") {
    RawGraph big{9, {Edge(0, 1)}};
    CHECK_THROWS_AS(solve_paint_game(big, std::vector<int>(9, 1)), guard_error);
    RawGraph k2{2, {Edge(0, 1)}};
    CHECK_THROWS_AS(solve_paint_game(k2, {6, 1}), guard_error);
  }
}

TEST_CASE("list coloring checker") {
  RawGraph c3{3, {Edge(0, 1), Edge(1, 2), Edge(0, 2)}};
  SECTION("triangle from pairs fails") {
    std::vector<std::vector<int>> lists{{1, 2}, {1, 2}, {1, 2}};
    CHECK_FALSE(check_L_coloring(c3, lists).has_value());
  }
  SECTION("triangle with a third color") {
    std::vector<std::vector<int>> lists{{1, 2}, {1, 2}, {1, 3}};
    auto col = check_L_coloring(c3, lists);
    REQUIRE(col.has_value());
    CHECK((*col)[0] != (*col)[1]);
    CHECK((*col)[1] != (*col)[2]);
    CHECK((*col)[0] != (*col)[2]);
  }
  SECTION("even cycle from pairs works") {
    RawGraph c4{4, {Edge(0, 1), Edge(1, 2), Edge(2, 3), Edge(3, 0)}};
    std::vector<std::vector<int>> lists{{1, 2}, {1, 2}, {1, 2}, {1, 2}};
    CHECK(check_L_coloring(c4, lists).has_value());
  }
}
