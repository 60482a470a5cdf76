// Acceptance harness: one line per criterion, exit 0 only if every line is
// a PASS. argv[1] is the command line binary, used by the trace criterion.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ato/generators.hpp"
#include "ato/oracles.hpp"
#include "ato/orientation.hpp"

using namespace ato;

namespace {

int failures = 0;

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void line(int idx, const char* name, bool pass, const std::string& detail,
          double secs) {
  std::printf("%d %-28s %s  %s (%.2fs)\n", idx, name, pass ? "PASS" : "FAIL",
              detail.c_str(), secs);
  if (!pass) ++failures;
}

int run_quiet(const std::string& cmd) {
  int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

OuterplaneGraph cycle_graph(int n) {
  std::vector<Vertex> b(n);
  for (int i = 0; i < n; ++i) b[i] = i;
  return OuterplaneGraph(b, {});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: acceptance <path-to-cli>\n");
    return 2;
  }
  const std::string cli = std::string("\"") + argv[1] + "\"";

  // Shared instance pool: n in [3,14], at most 22 arcs, S sampled per edge
  // and forced nonempty on bare cycles.
  std::vector<Instance> pool;
  {
    Rng rng(20260818);
    GenOptions o;
    o.n_lo = 3;
    o.n_hi = 14;
    o.s_prob = 0.3;
    for (int guard = 0; static_cast<int>(pool.size()) < 1000 && guard < 100000;
         ++guard) {
      Instance inst = gen_general(rng, o);
      if (inst.graph.edge_count() <= 22) pool.push_back(std::move(inst));
    }
  }

  // 1: constructed orientations satisfy the S-aware definition, with the
  // Eulerian census parity confirmed on every instance.
  {
    auto t0 = std::chrono::steady_clock::now();
    int ok = 0;
    for (const Instance& inst : pool) {
      try {
        OrientResult r = orient_valid(inst.graph, inst.s);
        ValidityReport rep =
            verify_valid(inst.graph, inst.s, r.d, r.s_arrows, false);
        if (rep.valid() && rep.parity_checked) ++ok;
      } catch (const std::exception&) {
      }
    }
    double secs = secs_since(t0);
    bool pass = pool.size() == 1000 && ok == 1000 && secs < 300;
    line(1, "valid-orientation suite", pass,
         std::to_string(ok) + "/" + std::to_string(pool.size()), secs);
  }

  // 2: same instances with S dropped (non-cycles), plus every even cycle up
  // to n=14, meet the 5-truncated bounds; odd cycles are refused.
  std::vector<OuterplaneGraph> suite2;
  {
    auto t0 = std::chrono::steady_clock::now();
    int ok = 0, total = 0;
    for (const Instance& inst : pool) {
      if (inst.graph.chords().empty()) continue;
      ++total;
      try {
        OrientResult r = orient_general(inst.graph);
        ValidityReport rep = verify_truncated(inst.graph, r.d, false);
        if (rep.valid() && rep.parity_checked) {
          ++ok;
          suite2.push_back(inst.graph);
        }
      } catch (const std::exception&) {
      }
    }
    for (int n = 4; n <= 14; n += 2) {
      ++total;
      OuterplaneGraph g = cycle_graph(n);
      try {
        OrientResult r = orient_general(g);
        ValidityReport rep = verify_truncated(g, r.d, false);
        if (rep.valid() && rep.parity_checked) {
          ++ok;
          suite2.push_back(g);
        }
      } catch (const std::exception&) {
      }
    }
    int rejected = 0;
    for (int n = 5; n <= 13; n += 2) {
      try {
        orient_general(cycle_graph(n));
      } catch (const class_error& e) {
        if (e.reason == ClassReason::OddCycleWithEmptyS) ++rejected;
      }
    }
    double secs = secs_since(t0);
    bool pass = ok == total && rejected == 5;
    line(2, "5-truncated suite", pass,
         std::to_string(ok) + "/" + std::to_string(total) + ", " +
             std::to_string(rejected) + "/5 odd cycles refused",
         secs);
  }

  // 3: bipartite suite meets the 4-truncated bounds with no odd Eulerian
  // sub-digraph and a strictly positive census difference.
  std::vector<OuterplaneGraph> suite3;
  {
    auto t0 = std::chrono::steady_clock::now();
    int ok = 0;
    Rng rng(77001);
    GenOptions o;
    o.n_lo = 4;
    o.n_hi = 14;
    o.s_prob = 0;
    for (int i = 0; i < 500; ++i) {
      Instance inst = gen_bipartite(rng, o);
      try {
        OrientResult r = orient_bipartite(inst.graph);
        ValidityReport rep = verify_truncated(inst.graph, r.d, true);
        if (rep.valid() && rep.parity_checked && rep.census.odd_count == 0 &&
            rep.census.diff == rep.census.total && rep.census.total >= 1) {
          ++ok;
          suite3.push_back(inst.graph);
        }
      } catch (const std::exception&) {
      }
    }
    double secs = secs_since(t0);
    line(3, "bipartite 4-truncated suite", ok == 500,
         std::to_string(ok) + "/500", secs);
  }

  // 4: the polynomial coefficient and the census difference agree in
  // absolute value over every orientation of five small graphs.
  {
    auto t0 = std::chrono::steady_clock::now();
    int ok = 0, total = 0;
    std::vector<OuterplaneGraph> small = {
        cycle_graph(3), cycle_graph(4), cycle_graph(5),
        OuterplaneGraph({0, 1, 2, 3}, {Edge(0, 2)}),
        OuterplaneGraph({0, 1, 2, 3, 4, 5}, {Edge(0, 3)})};
    for (const OuterplaneGraph& g : small) {
      std::vector<Edge> edges = g.edges();
      int m = static_cast<int>(edges.size());
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        ++total;
        std::vector<Arc> arcs;
        for (int i = 0; i < m; ++i) {
          bool fwd = mask >> i & 1;
          arcs.push_back(fwd ? Arc{edges[i].a, edges[i].b, 1}
                             : Arc{edges[i].b, edges[i].a, 1});
        }
        WeightedOrientation d(std::move(arcs));
        std::int64_t coef = at_poly_coefficient(d);
        std::int64_t diff = eulerian_census(d).diff;
        if (std::abs(coef) == std::abs(diff)) ++ok;
      }
    }
    double secs = secs_since(t0);
    bool pass = ok == total && total == 216 && secs < 60;
    line(4, "polynomial-census agreement", pass,
         std::to_string(ok) + "/" + std::to_string(total) + " orientations",
         secs);
  }

  // 5: every distinct shape with n <= 6 from suites 2 and 3 is a Painter
  // win for f = min(k, degree), k = 5 weighted and k = 4 bipartite.
  {
    auto t0 = std::chrono::steady_clock::now();
    std::map<std::string, std::pair<OuterplaneGraph, int>> shapes;
    for (const OuterplaneGraph& g : suite2)
      if (g.n() <= 6) shapes.emplace("g5:" + shape_key(g), std::pair{g, 5});
    for (const OuterplaneGraph& g : suite3)
      if (g.n() <= 6) shapes.emplace("b4:" + shape_key(g), std::pair{g, 4});
    int ok = 0;
    for (const auto& [key, gk] : shapes) {
      const auto& [g, k] = gk;
      RawGraph raw = to_raw(g);
      std::vector<int> f(raw.n);
      for (int v = 0; v < raw.n; ++v)
        f[v] = std::min(k, g.degree(g.at(v)));
      if (solve_paint_game(raw, f).winner == Winner::Painter) ++ok;
    }
    double secs = secs_since(t0);
    bool pass = !shapes.empty() && ok == static_cast<int>(shapes.size()) &&
                secs < 600;
    line(5, "paintability at small n", pass,
         std::to_string(ok) + "/" + std::to_string(shapes.size()) + " shapes",
         secs);
  }

  // 6: negative controls. Directed odd cycles have census difference zero,
  // a single edge with one token per endpoint is a Lister win, and the
  // triangle with two-entry lists has no proper coloring from them.
  {
    auto t0 = std::chrono::steady_clock::now();
    int ok = 0, total = 0;
    for (int n = 3; n <= 13; n += 2) {
      ++total;
      std::vector<Arc> arcs;
      for (int i = 0; i < n; ++i) arcs.push_back(Arc{i, (i + 1) % n, 1});
      if (eulerian_census(WeightedOrientation(std::move(arcs))).diff == 0)
        ++ok;
    }
    ++total;
    RawGraph k2;
    k2.n = 2;
    k2.edges = {Edge(0, 1)};
    if (solve_paint_game(k2, {1, 1}).winner == Winner::Lister) ++ok;
    ++total;
    RawGraph c3;
    c3.n = 3;
    c3.edges = {Edge(0, 1), Edge(1, 2), Edge(0, 2)};
    if (!check_L_coloring(c3, {{1, 2}, {1, 2}, {1, 2}}).has_value()) ++ok;
    double secs = secs_since(t0);
    line(6, "negative controls", ok == total,
         std::to_string(ok) + "/" + std::to_string(total) + " controls", secs);
  }

  // 7: the CLI round trip. Orient with --trace, replay through the CLI and
  // in-process; the replay re-checks every intermediate level, including
  // the l <= r budget at each step.
  {
    auto t0 = std::chrono::steady_clock::now();
    std::filesystem::path dir =
        std::filesystem::path("/tmp") /
        ("ato_acceptance_" + std::to_string(getpid()));
    std::filesystem::create_directories(dir);
    std::string inst_path = (dir / "inst.json").string();
    std::string trace_path = (dir / "trace.json").string();
    int ok = 0;
    GenOptions o;
    o.n_lo = 3;
    o.n_hi = 14;
    o.s_prob = 0.3;
    for (int i = 0; i < 100; ++i) {
      Rng rng(derive_seed(515001, static_cast<std::uint64_t>(i)));
      Instance inst = gen_general(rng, o);
      {
        std::ofstream out(inst_path);
        out << serialize_instance(inst.graph, inst.s) << '\n';
      }
      if (run_quiet(cli + " orient " + inst_path + " --trace -o " +
                    trace_path) != 0)
        continue;
      if (run_quiet(cli + " verify " + inst_path + " --trace " + trace_path) !=
          0)
        continue;
      std::ifstream in(trace_path);
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      try {
        ParsedTrace t = parse_trace(text);
        const TraceStep& top = replay_trace(t);
        bool budgets = true;
        for (const TraceStep& st : t.steps) budgets &= st.l <= st.r;
        if (budgets && shape_key(top.graph) == shape_key(inst.graph)) ++ok;
      } catch (const std::exception&) {
      }
    }
    std::filesystem::remove_all(dir);
    double secs = secs_since(t0);
    line(7, "trace replay round trip", ok == 100,
         std::to_string(ok) + "/100 traces", secs);
  }

  if (failures == 0) std::printf("acceptance: all criteria pass\n");
  return failures == 0 ? 0 : 1;
}
