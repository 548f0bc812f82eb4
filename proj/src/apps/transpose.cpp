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

namespace {
struct PlacedEntry {
  std::int64_t local_row; // on the receiving PE
  std::int64_t col;
};
} // namespace

SparseMatrixPartition transpose_kernel(PeContext &ctx, const SparseMatrixPartition &a, const SelectorOptions &opts) {
  const PartitionedLayout &layout = ctx.layout();
  std::vector<std::vector<std::int64_t>> rows(static_cast<std::size_t>(layout.local_size(ctx.rank(), a.ncols_global())));

  Actor<PlacedEntry> actor(ctx, opts);
  actor.mailbox(0).process = [&rows](const PlacedEntry &e, PeId) {
    rows[static_cast<std::size_t>(e.local_row)].push_back(e.col);
  };
  actor.start();
  for (std::int64_t l = 0; l < a.local_rows(); ++l) {
    const std::int64_t r = a.global_row(l);
    for (std::int64_t c : a.row(l))
      actor.send(layout.owner_of(c), PlacedEntry{layout.local_of(c), r});
  }
  actor.done();
  actor.wait();
  return SparseMatrixPartition::from_rows(a.ncols_global(), a.nrows_global(), layout, ctx.rank(), std::move(rows));
}

namespace {
std::uint64_t entry_digest(const SparseMatrixPartition &m) {
  std::uint64_t d = 0;
  for (const Entry &e : m.entries())
    d += digest(static_cast<std::uint64_t>(e.row), static_cast<std::uint64_t>(e.col));
  return d;
}
} // namespace

AppReport run_transpose(const AppConfig &cfg) {
  return detail::launch_app(cfg, [&](PeContext &ctx, AppReport &rep) {
    const std::int64_t n = cfg.rows_per_pe * ctx.npes();
    const auto opts = detail::selector_for(cfg);
    const auto a = gen_er_matrix(cfg.seed, n, cfg.nnz_per_row, ctx.layout(), ctx.rank());

    detail::PhaseMeasure phase;
    const auto at = detail::timed_phase(ctx, phase, [&] { return transpose_kernel(ctx, a, opts); });
    detail::record_phase(rep, phase);
    rep.checksum = detail::reduce_checksum(ctx, entry_digest(at));

    const bool nnz_kept = ctx.allreduce_sum(a.nnz_local()) == ctx.allreduce_sum(at.nnz_local());
    rep.valid = nnz_kept;
    if (!cfg.validate)
      return;
    const auto att = transpose_kernel(ctx, at, opts);
    const bool round_trip = ctx.allreduce_sum(att == a ? 0 : 1) == 0;
    const SerialMatrix full_a = gather_matrix(ctx, a);
    const SerialMatrix full_at = gather_matrix(ctx, at);
    if (ctx.rank() == PeId(0)) {
      const bool same = transpose_oracle(full_a) == full_at;
      rep.validated = true;
      rep.matches_serial_oracle = same;
      rep.valid = nnz_kept && round_trip && same;
      if (!rep.valid)
        rep.diagnostic = !same ? "transpose differs from the serial transpose" : "transpose(transpose(A)) != A";
    }
  });
}

} // namespace fabsp::apps
