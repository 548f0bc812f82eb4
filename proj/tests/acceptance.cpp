/*
 *   Copyright 2026 The fabsp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Pass --verbose for one line per configuration.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "conveyor_fuzz.hpp"
#include "fabsp/apps/apps.hpp"
#include "fabsp/apps/kernels.hpp"
#include "fabsp/selector.hpp"

using namespace fabsp;
using namespace fabsp::apps;

namespace {

bool verbose = false;

void note(const std::string &line) {
  if (verbose)
    std::printf("    %s\n", line.c_str());
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string &why) {
    if (pass)
      detail = why;
    pass = false;
  }
};

struct Timed {
  AppReport report;
  double seconds = 0.0;
};

Timed timed_run(const AppConfig &cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t{run_app(cfg), 0.0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

std::string describe(const AppConfig &cfg) {
  std::ostringstream os;
  os << app_name(cfg.app) << " P=" << cfg.npes << " seed=" << cfg.seed;
  return os.str();
}

const std::map<App, std::uint64_t> kSeeds{{App::Histogram, 42},      {App::IndexGather, 7},
                                          {App::PermuteMatrix, 3},   {App::RandomPermutation, 11},
                                          {App::TopologicalSort, 5}, {App::Transpose, 3},
                                          {App::TriangleCount, 13}};

// Sizes of the oracle suite.
AppConfig suite_config(App app, int npes) {
  AppConfig cfg = AppConfig::defaults_for(app);
  cfg.npes = npes;
  cfg.seed = kSeeds.at(app);
  cfg.updates_per_pe = 100'000;
  cfg.reads_per_pe = 100'000;
  cfg.elements_per_pe = 10'000;
  if (app == App::IndexGather)
    cfg.table_per_pe = 10'000;
  else
    cfg.table_per_pe = 1000;
  if (app == App::TriangleCount) {
    cfg.rows_per_pe = 200;
    cfg.nnz_per_row = 8.0;
  } else {
    cfg.rows_per_pe = 1000;
    cfg.nnz_per_row = 10.0;
  }
  return cfg;
}

Verdict oracle_suite() {
  Verdict v;
  double slowest = 0.0;
  int runs = 0;
  for (App app : kAllApps)
    for (int p : {1, 2, 4, 8, 16}) {
      const AppConfig cfg = suite_config(app, p);
      const Timed t = timed_run(cfg);
      ++runs;
      slowest = std::max(slowest, t.seconds);
      note(describe(cfg) + (t.report.valid ? " valid " : " INVALID ") + std::to_string(t.seconds) + " s");
      if (!t.report.validated)
        v.fail(describe(cfg) + ": validity checker did not run");
      else if (!t.report.valid)
        v.fail(describe(cfg) + ": " + t.report.diagnostic);
      else if (t.seconds >= 60.0)
        v.fail(describe(cfg) + ": took " + std::to_string(t.seconds) + " s");
    }
  if (v.pass)
    v.detail = std::to_string(runs) + " runs valid, slowest " + std::to_string(slowest) + " s";
  return v;
}

Verdict conveyor_conservation() {
  Verdict v;
  int schedules = 0;
  std::uint64_t pushed = 0, pulled = 0, worst = 0;
  for (int p : {1, 2, 4, 8})
    for (std::uint64_t seed = 0; seed < 250; ++seed) {
      const auto o = testing::run_conveyor_fuzz(seed * 7919 + static_cast<std::uint64_t>(p), p);
      ++schedules;
      pushed += o.pushed;
      pulled += o.pulled;
      worst = std::max(worst, o.max_steps);
      const std::string where = "P=" + std::to_string(p) + " seed=" + std::to_string(seed);
      if (!o.terminated || o.max_steps >= testing::kFuzzWatchdogSteps)
        v.fail(where + ": advance loop hit the watchdog");
      else if (o.pushed != o.pulled || !o.exactly_once)
        v.fail(where + ": pushed " + std::to_string(o.pushed) + " pulled " + std::to_string(o.pulled));
      else if (!o.sender_matches || !o.quiescent_after_complete)
        v.fail(where + ": sender mismatch or traffic after completion");
    }
  if (v.pass)
    v.detail = std::to_string(schedules) + " schedules, " + std::to_string(pushed) + " pushed == " +
               std::to_string(pulled) + " pulled, max " + std::to_string(worst) + " steps";
  return v;
}

Verdict aggregation_ratio() {
  Verdict v;
  AppConfig cfg = AppConfig::defaults_for(App::Histogram);
  cfg.npes = 8;
  cfg.updates_per_pe = 1'000'000;
  cfg.buffer_items = 1024;
  cfg.seed = 42;
  const AppReport rep = run_app(cfg);
  const double ratio = rep.stats.frames_sent == 0 ? 0.0
                                                  : static_cast<double>(rep.stats.items_pushed) /
                                                        static_cast<double>(rep.stats.frames_sent);
  std::ostringstream os;
  os << rep.stats.items_pushed << " items / " << rep.stats.frames_sent << " frames = " << ratio;
  v.detail = os.str();
  if (!rep.valid)
    v.fail("histogram run invalid: " + rep.diagnostic);
  else if (rep.stats.items_pushed != 8'000'000)
    v.fail("expected 8000000 items, got " + std::to_string(rep.stats.items_pushed));
  else if (ratio < 100.0)
    v.fail(os.str() + " is below 100");
  return v;
}

struct Hop {
  std::int64_t id;
  std::int64_t path; // bitmask of mailboxes visited
};

// Runs a selector over the given graph with done() on Outside-fed mailboxes
// only. Each mailbox forwards every message to all of its successors on a
// rotating PE; sinks count arrivals. Returns "" on success.
std::string run_graph(const TerminationGraph &g, int npes, std::int64_t per_pe, std::int64_t expected_per_source) {
  std::string problem;
  std::mutex mu;
  std::int64_t total_sink = 0;
  launch_spmd({.npes = npes}, [&](PeContext &ctx) {
    Selector<Hop> sel(ctx, g, {.ring_capacity = 4, .buffer_items = 8});
    std::int64_t local_sink = 0;
    for (std::size_t m = 0; m < g.size(); ++m) {
      const auto succ = g.successors(static_cast<int>(m));
      sel.mailbox(m).process = [&, m, succ](const Hop &h, PeId) {
        const Hop next{h.id, h.path | (std::int64_t{1} << m)};
        if (succ.empty())
          ++local_sink;
        for (int s : succ)
          sel.send(static_cast<std::size_t>(s), PeId(static_cast<int>((h.id + s) % ctx.npes())), next);
      };
    }
    sel.start();
    std::vector<std::size_t> sources;
    for (std::size_t m = 0; m < g.size(); ++m)
      if (g.fed_from_outside(static_cast<int>(m)))
        sources.push_back(m);
    for (std::size_t m : sources)
      for (std::int64_t i = 0; i < per_pe; ++i) {
        const std::int64_t id = ctx.rank().rank * per_pe + i;
        sel.send(m, PeId(static_cast<int>(id % ctx.npes())), Hop{id, 0});
      }
    // done() on anything that is not Outside-fed must be refused.
    for (std::size_t m = 0; m < g.size(); ++m)
      if (!g.fed_from_outside(static_cast<int>(m))) {
        bool refused = false;
        try {
          sel.done(m);
        } catch (const UsageError &) {
          refused = true;
        }
        if (!refused) {
          std::lock_guard lock(mu);
          problem = "done() accepted on internal mailbox " + std::to_string(m);
        }
      }
    for (std::size_t m : sources)
      sel.done(m);
    sel.wait();
    for (std::size_t m = 0; m < g.size(); ++m)
      if (!sel.completion(m).ready()) {
        std::lock_guard lock(mu);
        problem = "mailbox " + std::to_string(m) + " never completed";
      }
    const std::int64_t sinks = ctx.allreduce_sum(local_sink);
    if (ctx.rank() == PeId(0))
      total_sink = sinks;
  });
  if (problem.empty() && total_sink != expected_per_source * per_pe * npes)
    problem = "sinks saw " + std::to_string(total_sink) + " messages, expected " +
              std::to_string(expected_per_source * per_pe * npes);
  return problem;
}

Verdict termination_graphs() {
  Verdict v;
  // chain 0 -> 1 -> 2: one arrival per source message.
  TerminationGraph chain = TerminationGraph::linear(3);
  // diamond 0 -> {1, 2} -> 3: two arrivals per source message.
  TerminationGraph diamond(4);
  diamond.add_edge(TerminationGraph::kOutside, 0);
  diamond.add_edge(0, 1);
  diamond.add_edge(0, 2);
  diamond.add_edge(1, 3);
  diamond.add_edge(2, 3);
  for (int p : {1, 2, 4, 8}) {
    if (auto e = run_graph(chain, p, 500, 1); !e.empty())
      v.fail("chain P=" + std::to_string(p) + ": " + e);
    if (auto e = run_graph(diamond, p, 500, 2); !e.empty())
      v.fail("diamond P=" + std::to_string(p) + ": " + e);
  }
  // index-gather calls done on its Request mailbox only.
  for (int p : {1, 4, 8}) {
    AppConfig cfg = AppConfig::defaults_for(App::IndexGather);
    cfg.npes = p;
    cfg.reads_per_pe = 20'000;
    cfg.seed = 7;
    const AppReport rep = run_app(cfg);
    if (!rep.valid)
      v.fail("index-gather P=" + std::to_string(p) + " invalid");
  }
  if (v.pass)
    v.detail = "chain, diamond and index-gather complete at P in {1,2,4,8}";
  return v;
}

Verdict backpressure() {
  Verdict v;
  double slowest = 0.0;
  for (App app : kAllApps) {
    AppConfig cfg = suite_config(app, 4);
    cfg.updates_per_pe /= 10;
    cfg.reads_per_pe /= 10;
    cfg.elements_per_pe /= 10;
    cfg.rows_per_pe /= 10;
    cfg.table_per_pe /= 10;
    cfg.ring_capacity = 1;
    cfg.buffer_items = 2;
    cfg.inbox_capacity = 1;
    const Timed t = timed_run(cfg);
    slowest = std::max(slowest, t.seconds);
    note(describe(cfg) + " C=1 B=2 inbox=1 " + std::to_string(t.seconds) + " s");
    if (!t.report.valid)
      v.fail(describe(cfg) + ": " + t.report.diagnostic);
    else if (t.seconds >= 120.0)
      v.fail(describe(cfg) + ": took " + std::to_string(t.seconds) + " s");
  }
  if (v.pass)
    v.detail = "7 apps valid with C=1, B=2, inbox 1 at P=4; slowest " + std::to_string(slowest) + " s";
  return v;
}

Verdict single_pe_equivalence() {
  Verdict v;
  for (App app : kAllApps) {
    const AppConfig cfg = suite_config(app, 1);
    const AppReport rep = run_app(cfg);
    if (!rep.matches_serial_oracle.has_value())
      v.fail(describe(cfg) + ": no serial comparison was made");
    else if (!*rep.matches_serial_oracle)
      v.fail(describe(cfg) + ": differs from the serial oracle");
    else if (!rep.valid)
      v.fail(describe(cfg) + ": " + rep.diagnostic);
  }
  if (v.pass)
    v.detail = "7 apps identical to their serial oracles";
  return v;
}

Verdict determinism() {
  Verdict v;
  for (App app : {App::Histogram, App::IndexGather, App::Transpose, App::PermuteMatrix, App::TriangleCount})
    for (int p : {1, 4, 8}) {
      AppConfig cfg = suite_config(app, p);
      cfg.validate = false;
      std::uint64_t first = 0;
      for (int i = 0; i < 5; ++i) {
        const AppReport rep = run_app(cfg);
        if (i == 0)
          first = rep.checksum;
        else if (rep.checksum != first)
          v.fail(describe(cfg) + ": checksum changed on run " + std::to_string(i + 1));
      }
      note(describe(cfg) + " checksum stable");
    }
  if (v.pass)
    v.detail = "5 apps x P in {1,4,8}, 5 runs each, checksums identical";
  return v;
}

} // namespace

int main(int argc, char **argv) {
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--verbose") == 0)
      verbose = true;
  const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria{
      {"oracle-suite", oracle_suite},
      {"conveyor-conservation", conveyor_conservation},
      {"aggregation-ratio", aggregation_ratio},
      {"termination-graphs", termination_graphs},
      {"backpressure", backpressure},
      {"single-pe-equivalence", single_pe_equivalence},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto &[name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception &e) {
      v.fail(std::string("threw: ") + e.what());
    }
    std::printf("%s %-22s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
