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

#include <algorithm>

#include "fabsp/apps/kernels.hpp"
#include "fabsp/apps/oracles.hpp"
#include "run_support.hpp"

namespace fabsp::apps {

namespace {
constexpr std::int64_t kMaxBruteForceVertices = 20'000;

struct Probe {
  std::int64_t local_row; // row j on its owner
  std::int64_t col;       // k < j
};
} // namespace

std::int64_t triangle_kernel(PeContext &ctx, const SparseMatrixPartition &lower, const SelectorOptions &opts) {
  const PartitionedLayout &layout = ctx.layout();
  std::int64_t found = 0;

  // Triangle i > j > k: row i holds j and k, and the owner of row j checks for k.
  Actor<Probe> actor(ctx, opts);
  actor.mailbox(0).process = [&](const Probe &p, PeId) {
    const auto row = lower.row(p.local_row);
    if (std::binary_search(row.begin(), row.end(), p.col))
      ++found;
  };
  actor.start();
  for (std::int64_t l = 0; l < lower.local_rows(); ++l) {
    const auto row = lower.row(l);
    for (std::size_t a = 1; a < row.size(); ++a)
      for (std::size_t b = 0; b < a; ++b)
        actor.send(layout.owner_of(row[a]), Probe{layout.local_of(row[a]), row[b]});
  }
  actor.done();
  actor.wait();
  return ctx.allreduce_sum(found);
}

AppReport run_triangle_count(const AppConfig &cfg) {
  return detail::launch_app(cfg, [&](PeContext &ctx, AppReport &rep) {
    const std::int64_t n = cfg.rows_per_pe * ctx.npes();
    const auto lower = gen_lower_graph(cfg.seed, n, cfg.nnz_per_row, ctx.layout(), ctx.rank());

    detail::PhaseMeasure phase;
    const std::int64_t count =
        detail::timed_phase(ctx, phase, [&] { return triangle_kernel(ctx, lower, detail::selector_for(cfg)); });
    detail::record_phase(rep, phase);
    rep.checksum = digest(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(count));
    rep.valid = count >= 0;
    if (!cfg.validate)
      return;
    if (n > kMaxBruteForceVertices) {
      rep.diagnostic = "graph too large for the brute-force check; not validated";
      return;
    }
    const SerialMatrix full = gather_matrix(ctx, lower);
    if (ctx.rank() == PeId(0)) {
      const std::int64_t expected = triangles_brute_force(full);
      rep.validated = true;
      rep.matches_serial_oracle = expected == count;
      rep.valid = expected == count;
      if (!rep.valid)
        rep.diagnostic = "found " + std::to_string(count) + " triangles, brute force found " + std::to_string(expected);
    }
  });
}

} // namespace fabsp::apps
