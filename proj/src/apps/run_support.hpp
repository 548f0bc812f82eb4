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

#ifndef FABSP_SRC_APPS_RUN_SUPPORT_HPP
#define FABSP_SRC_APPS_RUN_SUPPORT_HPP

#include <chrono>
#include <functional>
#include <numeric>
#include <span>

#include "fabsp/apps/apps.hpp"
#include "fabsp/apps/generators.hpp"
#include "fabsp/selector.hpp"

namespace fabsp::apps::detail {

inline FabricConfig fabric_for(const AppConfig &cfg) {
  return FabricConfig{.npes = cfg.npes, .inbox_capacity = cfg.inbox_capacity, .seed = cfg.seed};
}

inline SelectorOptions selector_for(const AppConfig &cfg) {
  return SelectorOptions{.ring_capacity = cfg.ring_capacity, .buffer_items = cfg.buffer_items};
}

struct PhaseMeasure {
  double seconds = 0.0;
  ConveyorStats stats;
};

/// Runs f between barriers and records wall time plus the conveyor traffic it
/// generated on all PEs. Collective.
template <class F> auto timed_phase(PeContext &ctx, PhaseMeasure &out, F &&f) {
  ctx.barrier();
  const ConveyorStats before = ctx.conveyor_totals();
  const auto t0 = std::chrono::steady_clock::now();
  auto result = f();
  ctx.barrier();
  const auto t1 = std::chrono::steady_clock::now();
  const ConveyorStats after = ctx.conveyor_totals();
  out.seconds = std::chrono::duration<double>(t1 - t0).count();
  out.stats.items_pushed = ctx.allreduce_sum_u64(after.items_pushed - before.items_pushed);
  out.stats.items_pulled = ctx.allreduce_sum_u64(after.items_pulled - before.items_pulled);
  out.stats.frames_sent = ctx.allreduce_sum_u64(after.frames_sent - before.frames_sent);
  out.stats.frames_received = ctx.allreduce_sum_u64(after.frames_received - before.frames_received);
  return result;
}

/// Launches the fabric for cfg and returns the report that rank 0 filled in.
inline AppReport launch_app(const AppConfig &cfg, const std::function<void(PeContext &, AppReport &)> &body) {
  cfg.check();
  AppReport report;
  report.app = cfg.app;
  report.config = cfg;
  launch_spmd(fabric_for(cfg), [&](PeContext &ctx) {
    AppReport ignored; // non-root ranks compute the same fields redundantly
    body(ctx, ctx.rank() == PeId(0) ? report : ignored);
  });
  return report;
}

inline void record_phase(AppReport &rep, const PhaseMeasure &m) {
  rep.wall_time_seconds = m.seconds;
  rep.stats = m.stats;
}

/// Sum of digests over this PE's contribution, reduced over all PEs.
inline std::uint64_t reduce_checksum(PeContext &ctx, std::uint64_t local) { return ctx.allreduce_sum_u64(local); }

} // namespace fabsp::apps::detail

#endif
