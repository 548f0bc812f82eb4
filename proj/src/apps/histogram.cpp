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

#include "fabsp/apps/kernels.hpp"
#include "fabsp/apps/oracles.hpp"
#include "run_support.hpp"

namespace fabsp::apps {

std::vector<std::int64_t> histogram_kernel(PeContext &ctx, std::span<const std::int64_t> global_indices,
                                           std::int64_t table_per_pe, const SelectorOptions &opts) {
  const PartitionedLayout &layout = ctx.layout();
  const std::int64_t global_size = table_per_pe * ctx.npes();
  std::vector<std::int64_t> table(static_cast<std::size_t>(table_per_pe), 0);

  Actor<std::int64_t> actor(ctx, opts);
  actor.mailbox(0).process = [&table](const std::int64_t &local, PeId) { table[static_cast<std::size_t>(local)] += 1; };
  actor.start();
  for (std::int64_t g : global_indices) {
    if (g < 0 || g >= global_size)
      throw UsageError("histogram index out of range");
    actor.send(layout.owner_of(g), layout.local_of(g));
  }
  actor.done();
  actor.wait();
  return table;
}

AppReport run_histogram(const AppConfig &cfg) {
  return detail::launch_app(cfg, [&](PeContext &ctx, AppReport &rep) {
    const std::int64_t global_size = cfg.table_per_pe * ctx.npes();
    const auto indices = gen_indices(cfg.seed, ctx.rank().rank, cfg.updates_per_pe, global_size);

    detail::PhaseMeasure phase;
    const auto table = detail::timed_phase(ctx, phase, [&] {
      return histogram_kernel(ctx, indices, cfg.table_per_pe, detail::selector_for(cfg));
    });
    detail::record_phase(rep, phase);

    std::uint64_t local_digest = 0;
    std::int64_t local_total = 0;
    for (std::size_t l = 0; l < table.size(); ++l) {
      local_total += table[l];
      if (table[l] != 0)
        local_digest += digest(static_cast<std::uint64_t>(ctx.layout().global_of(ctx.rank(), static_cast<std::int64_t>(l))),
                               static_cast<std::uint64_t>(table[l]));
    }
    rep.checksum = detail::reduce_checksum(ctx, local_digest);
    const bool total_ok = ctx.allreduce_sum(local_total) == cfg.updates_per_pe * ctx.npes();
    rep.valid = total_ok;

    if (cfg.validate) {
      const auto gathered = gather_cyclic(ctx, table, global_size);
      if (ctx.rank() == PeId(0)) {
        const bool same = gathered == histogram_oracle(cfg.seed, ctx.npes(), cfg.updates_per_pe, global_size);
        rep.validated = true;
        rep.matches_serial_oracle = same;
        rep.valid = total_ok && same;
        if (!rep.valid)
          rep.diagnostic = "bucket counts differ from the serial replay";
      }
    }
  });
}

} // namespace fabsp::apps
