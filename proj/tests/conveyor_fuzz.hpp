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

#ifndef FABSP_TESTS_CONVEYOR_FUZZ_HPP
#define FABSP_TESTS_CONVEYOR_FUZZ_HPP

// Randomized push/pull/advance schedules over a single conveyor, shared by
// the unit tests and the acceptance suite.

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <random>
#include <vector>

#include "fabsp/conveyor.hpp"

namespace fabsp::testing {

struct FuzzItem {
  std::uint32_t sender;
  std::uint32_t seq;
  std::uint32_t dest;
  auto operator<=>(const FuzzItem &) const = default;
};

struct FuzzOutcome {
  int npes = 0;
  bool terminated = true; // every PE's advance returned false within the watchdog
  bool exactly_once = false;
  bool quiescent_after_complete = true;
  bool sender_matches = true;
  std::uint64_t pushed = 0;
  std::uint64_t pulled = 0;
  std::uint64_t max_steps = 0;
};

inline constexpr std::uint64_t kFuzzWatchdogSteps = 100'000'000;

inline FuzzOutcome run_conveyor_fuzz(std::uint64_t seed, int npes) {
  std::mt19937_64 setup(seed);
  const std::size_t buffer_items = 1 + setup() % 16;
  const std::size_t inbox = 1 + setup() % 8;
  const std::uint32_t max_items = static_cast<std::uint32_t>(setup() % 400);

  FuzzOutcome out;
  out.npes = npes;
  std::vector<FuzzItem> pushed_all, pulled_all;
  std::mutex m;
  launch_spmd({.npes = npes, .inbox_capacity = inbox}, [&](PeContext &ctx) {
    const auto me = static_cast<std::uint32_t>(ctx.rank().rank);
    std::mt19937_64 rng(seed * 7919 + me);
    Conveyor conv(ctx, sizeof(FuzzItem), buffer_items);
    const std::uint32_t n = max_items == 0 ? 0 : static_cast<std::uint32_t>(rng() % (max_items + 1));
    std::vector<FuzzItem> todo(n);
    for (std::uint32_t i = 0; i < n; ++i)
      todo[i] = FuzzItem{me, i, static_cast<std::uint32_t>(rng() % static_cast<std::uint64_t>(ctx.npes()))};
    std::vector<FuzzItem> pushed, pulled;
    std::size_t next = 0;
    bool done = false, finished = false, sender_ok = true;
    std::uint64_t steps = 0;
    auto pull_some = [&](std::uint64_t k) {
      for (std::uint64_t i = 0; i < k; ++i) {
        auto p = conv.pull_as<FuzzItem>();
        if (!p)
          break;
        sender_ok = sender_ok && p->first.sender == static_cast<std::uint32_t>(p->second.rank);
        FuzzItem got = p->first;
        got.dest = me;
        pulled.push_back(got);
      }
    };
    while (!finished && steps < kFuzzWatchdogSteps) {
      ++steps;
      switch (rng() % 5) {
      case 0:
      case 1:
        if (next < todo.size() && conv.push(PeId(static_cast<int>(todo[next].dest)), todo[next]))
          pushed.push_back(todo[next++]);
        break;
      case 2:
        pull_some(rng() % 4);
        break;
      case 3:
        tasking::yield_now();
        break;
      default:
        if (next == todo.size() && !done && rng() % 3 == 0)
          done = true;
        if (!conv.advance(done))
          finished = true;
        break;
      }
    }
    bool quiet = true;
    if (finished)
      for (int i = 0; i < 10; ++i)
        quiet = quiet && !conv.pull().has_value();
    const ConveyorStats st = conv.stats();
    std::lock_guard lock(m);
    out.terminated = out.terminated && finished;
    out.quiescent_after_complete = out.quiescent_after_complete && quiet;
    out.sender_matches = out.sender_matches && sender_ok;
    out.pushed += st.items_pushed;
    out.pulled += st.items_pulled;
    out.max_steps = std::max(out.max_steps, steps);
    pushed_all.insert(pushed_all.end(), pushed.begin(), pushed.end());
    pulled_all.insert(pulled_all.end(), pulled.begin(), pulled.end());
  });
  std::sort(pushed_all.begin(), pushed_all.end());
  std::sort(pulled_all.begin(), pulled_all.end());
  out.exactly_once = pushed_all == pulled_all;
  return out;
}

} // namespace fabsp::testing

#endif
