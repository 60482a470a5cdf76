// Command line front end: orient instances, verify orientations and traces,
// run seeded batches, and poke the brute-force oracles directly.
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ato/generators.hpp"
#include "ato/oracles.hpp"
#include "ato/orientation.hpp"

namespace {

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw ato::parse_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ato::parse_error("cannot write file: " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
  if (const char* env = std::getenv("ATO_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ato::parse_error("ATO_SEED is not a number");
    }
  }
  return cli_seed;
}

struct ModeFlags {
  bool bipartite = false;
  int k = 0;  // 0 = default for the mode

  bool bip() const { return bipartite || k == 4; }

  void attach(CLI::App* cmd) {
    cmd->add_flag("--bipartite", bipartite,
                  "bipartite mode (unit weights, 4-truncated)");
    cmd->add_option("--k", k, "truncation threshold: 5 (weighted) or 4 (bipartite)")
        ->check(CLI::IsMember({4, 5}));
  }
};

void print_census(const ato::EulerianCensus& c) {
  std::printf("even=%lld odd=%lld total=%lld diff=%lld\n",
              static_cast<long long>(c.even_count),
              static_cast<long long>(c.odd_count),
              static_cast<long long>(c.total),
              static_cast<long long>(c.diff));
}

ato::OrientResult run_orient(const ato::Instance& inst, bool bip) {
  if (!inst.s.empty())
    return bip ? ato::orient_bipartite_valid(inst.graph, inst.s)
               : ato::orient_valid(inst.graph, inst.s);
  return bip ? ato::orient_bipartite(inst.graph)
             : ato::orient_general(inst.graph);
}

int cmd_orient(const std::string& input, const std::string& output, bool bip,
               bool trace) {
  ato::Instance inst = ato::parse_graph(read_all(input));
  ato::OrientResult r = run_orient(inst, bip);
  write_out(output, trace ? ato::trace_to_json(r)
                          : ato::serialize_orientation(r.d, r.s_arrows));
  return 0;
}

int report(const ato::ValidityReport& rep) {
  for (const std::string& v : rep.violations) std::printf("invalid: %s\n", v.c_str());
  if (!rep.valid()) return 1;
  if (rep.parity_checked)
    print_census(rep.census);
  else
    std::printf("parity unchecked (more than 30 arcs)\n");
  std::printf("valid\n");
  return 0;
}

int cmd_verify(const std::string& input, const std::string& orientation,
               const std::string& trace, bool bip) {
  if (!trace.empty()) {
    ato::ParsedTrace t = ato::parse_trace(read_all(trace));
    const ato::TraceStep* top = nullptr;
    try {
      top = &ato::replay_trace(t);
    } catch (const ato::parse_error&) {
      throw;
    } catch (const ato::error& e) {
      std::printf("invalid: %s\n", e.what());
      return 1;
    }
    if (!input.empty()) {
      ato::Instance inst = ato::parse_graph(read_all(input));
      if (ato::serialize_instance(inst.graph, inst.s) !=
          ato::serialize_instance(top->graph, top->s)) {
        std::printf("invalid: trace ends on a different instance\n");
        return 1;
      }
    }
    std::printf("trace ok: %zu steps\n", t.steps.size());
    std::printf("valid\n");
    return 0;
  }
  if (input.empty() || orientation.empty())
    throw ato::parse_error("verify needs an instance and --orientation, or --trace");
  ato::Instance inst = ato::parse_graph(read_all(input));
  auto [d, sa] = ato::parse_orientation(read_all(orientation));
  if (!inst.s.empty() || !sa.empty())
    return report(ato::verify_valid(inst.graph, inst.s, d, sa, bip));
  return report(ato::verify_truncated(inst.graph, d, bip));
}

struct BatchCounters {
  std::atomic<int> pass{0};
  std::atomic<int> parity_unchecked{0};
  std::mutex out_mutex;
};

void batch_one(std::uint64_t item_seed, const ato::GenOptions& opts, bool bip,
               bool theorem, BatchCounters& counters) {
  ato::Rng rng(item_seed);
  ato::Instance inst;
  for (std::uint64_t attempt = 0;; ++attempt) {
    inst = bip ? ato::gen_bipartite(rng, opts) : ato::gen_general(rng, opts);
    if (theorem) inst.s = ato::BoundaryEdgeMultiset{};
    if (ato::classify_instance(inst.graph, inst.s, bip).accepted() &&
        !(inst.s.empty() && ato::is_cycle(inst.graph) && !theorem))
      break;
    if (attempt > 64)
      throw ato::internal_error("batch cannot draw an in-class instance");
  }
  try {
    ato::OrientResult r = run_orient(inst, bip);
    ato::ValidityReport rep =
        theorem ? ato::verify_truncated(inst.graph, r.d, bip)
                : ato::verify_valid(inst.graph, inst.s, r.d, r.s_arrows, bip);
    ato::replay_trace(ato::parse_trace(ato::trace_to_json(r)));
    if (rep.valid()) {
      counters.pass.fetch_add(1);
      if (!rep.parity_checked) counters.parity_unchecked.fetch_add(1);
      return;
    }
    std::lock_guard<std::mutex> lock(counters.out_mutex);
    std::fprintf(stderr, "batch fail %s: %s\n",
                 ato::serialize_instance(inst.graph, inst.s).c_str(),
                 rep.violations.front().c_str());
  } catch (const std::exception& e) {
    std::lock_guard<std::mutex> lock(counters.out_mutex);
    std::fprintf(stderr, "batch fail %s: %s\n",
                 ato::serialize_instance(inst.graph, inst.s).c_str(), e.what());
  }
}

int cmd_batch(int count, std::uint64_t seed, const ato::GenOptions& opts,
              bool bip, bool theorem, int workers) {
  BatchCounters counters;
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      batch_one(ato::derive_seed(seed, static_cast<std::uint64_t>(i)), opts,
                bip, theorem, counters);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  std::printf("%d/%d pass\n", counters.pass.load(), count);
  if (counters.parity_unchecked.load() > 0)
    std::printf("%d parity unchecked (more than 30 arcs)\n",
                counters.parity_unchecked.load());
  return counters.pass.load() == count ? 0 : 1;
}

int cmd_census(const std::string& input) {
  auto [d, sa] = ato::parse_orientation(read_all(input));
  (void)sa;
  print_census(ato::eulerian_census(d));
  return 0;
}

int cmd_paint(const std::string& input, bool bip) {
  ato::Instance inst = ato::parse_graph(read_all(input));
  ato::RawGraph raw = ato::to_raw(inst.graph);
  int k = bip ? 4 : 5;
  std::vector<int> f(raw.n);
  for (int v = 0; v < raw.n; ++v)
    f[v] = std::min(k, inst.graph.degree(inst.graph.at(v)));
  ato::GameResult res = ato::solve_paint_game(raw, f);
  std::printf("winner=%s\n",
              res.winner == ato::Winner::Painter ? "Painter" : "Lister");
  return 0;
}

int cmd_dot(const std::string& input, const std::string& orientation) {
  ato::Instance inst = ato::parse_graph(read_all(input));
  if (orientation.empty()) {
    std::cout << ato::to_dot(inst.graph);
    return 0;
  }
  auto [d, sa] = ato::parse_orientation(read_all(orientation));
  (void)sa;
  std::cout << ato::to_dot(inst.graph, d);
  return 0;
}

int cmd_gen(int count, std::uint64_t seed, const ato::GenOptions& opts,
            bool bip) {
  for (int i = 0; i < count; ++i) {
    ato::Rng rng(ato::derive_seed(seed, static_cast<std::uint64_t>(i)));
    ato::Instance inst =
        bip ? ato::gen_bipartite(rng, opts) : ato::gen_general(rng, opts);
    std::cout << ato::serialize_instance(inst.graph, inst.s) << '\n';
  }
  return 0;
}

void attach_gen_options(CLI::App* cmd, ato::GenOptions& opts) {
  cmd->add_option("--n-lo", opts.n_lo, "smallest vertex count");
  cmd->add_option("--n-hi", opts.n_hi, "largest vertex count");
  cmd->add_option("--chord-prob", opts.chord_prob,
                  "chance of subdividing a region further");
  cmd->add_option("--s-prob", opts.s_prob, "chance of each boundary edge joining S");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated-degree orientations of outerplanar graphs"};
  app.require_subcommand(1);

  std::string input = "-", output, orientation, trace_file;
  bool trace = false, theorem = false;
  int count = 100, workers = 1;
  std::uint64_t seed = 1;
  ato::GenOptions gen_opts;
  ModeFlags orient_mode, verify_mode, batch_mode, paint_mode, gen_mode;

  CLI::App* orient = app.add_subcommand("orient", "orient an instance");
  orient->add_option("input", input, "instance JSON (- for stdin)");
  orient->add_option("-o,--output", output, "output path (default stdout)");
  orient->add_flag("--trace", trace, "emit the full construction trace");
  orient_mode.attach(orient);

  CLI::App* verify = app.add_subcommand("verify", "check an orientation or trace");
  std::string verify_input;
  verify->add_option("input", verify_input, "instance JSON");
  verify->add_option("--orientation", orientation, "orientation JSON to check");
  verify->add_option("--trace", trace_file, "construction trace to replay");
  verify_mode.attach(verify);

  CLI::App* batch = app.add_subcommand("batch", "generate, orient and verify N instances");
  batch->add_option("-n,--count", count, "instances to run");
  batch->add_option("--seed", seed, "base seed (ATO_SEED overrides)");
  batch->add_option("--workers", workers, "worker threads");
  batch->add_flag("--theorem", theorem, "drop S and check the truncated bounds");
  attach_gen_options(batch, gen_opts);
  batch_mode.attach(batch);

  CLI::App* census = app.add_subcommand("census", "Eulerian sub-digraph census of an orientation");
  census->add_option("input", input, "orientation JSON (- for stdin)");

  CLI::App* paint = app.add_subcommand("paint", "solve the painting game with f = min(k, degree)");
  paint->add_option("input", input, "instance JSON (- for stdin)");
  paint_mode.attach(paint);

  CLI::App* dot = app.add_subcommand("dot", "Graphviz view of an instance");
  dot->add_option("input", input, "instance JSON (- for stdin)");
  dot->add_option("--orientation", orientation, "orientation JSON to overlay");

  CLI::App* gen = app.add_subcommand("gen", "emit random instances, one JSON per line");
  gen->add_option("-n,--count", count, "instances to emit");
  gen->add_option("--seed", seed, "base seed (ATO_SEED overrides)");
  attach_gen_options(gen, gen_opts);
  gen_mode.attach(gen);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*orient) return cmd_orient(input, output, orient_mode.bip(), trace);
    if (*verify)
      return cmd_verify(verify_input, orientation, trace_file, verify_mode.bip());
    if (*batch)
      return cmd_batch(count, effective_seed(seed), gen_opts, batch_mode.bip(),
                       theorem, workers);
    if (*census) return cmd_census(input);
    if (*paint) return cmd_paint(input, paint_mode.bip());
    if (*dot) return cmd_dot(input, orientation);
    if (*gen)
      return cmd_gen(count, effective_seed(seed), gen_opts, gen_mode.bip());
  } catch (const ato::parse_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const ato::class_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const ato::guard_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 4;
  } catch (const ato::internal_error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const ato::error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  }
  return 0;
}
