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
  std::int64_t local_row;
  std::int64_t col;
};
} // namespace

SparseMatrixPartition permute_kernel(PeContext &ctx, const SparseMatrixPartition &a,
                                     std::span<const std::int64_t> row_perm, std::span<const std::int64_t> col_perm,
                                     const SelectorOptions &opts) {
  if (static_cast<std::int64_t>(row_perm.size()) != a.nrows_global() ||
      static_cast<std::int64_t>(col_perm.size()) != a.ncols_global())
    throw UsageError("permutation length does not match the matrix");
  const PartitionedLayout &layout = ctx.layout();
  std::vector<std::vector<std::int64_t>> rows(static_cast<std::size_t>(a.local_rows()));

  Actor<PlacedEntry> actor(ctx, opts);
  actor.mailbox(0).process = [&rows](const PlacedEntry &e, PeId) {
    rows[static_cast<std::size_t>(e.local_row)].push_back(e.col);
  };
  actor.start();
  for (std::int64_t l = 0; l < a.local_rows(); ++l) {
    const std::int64_t new_row = row_perm[static_cast<std::size_t>(a.global_row(l))];
    for (std::int64_t c : a.row(l))
      actor.send(layout.owner_of(new_row), PlacedEntry{layout.local_of(new_row), col_perm[static_cast<std::size_t>(c)]});
  }
  actor.done();
  actor.wait();
  return SparseMatrixPartition::from_rows(a.nrows_global(), a.ncols_global(), layout, ctx.rank(), std::move(rows));
}

AppReport run_permute_matrix(const AppConfig &cfg) {
  return detail::launch_app(cfg, [&](PeContext &ctx, AppReport &rep) {
    const std::int64_t n = cfg.rows_per_pe * ctx.npes();
    const auto a = gen_er_matrix(cfg.seed, n, cfg.nnz_per_row, ctx.layout(), ctx.rank());

    // Permutations are drawn serially on rank 0 and broadcast.
    std::vector<std::int64_t> rp, cp;
    if (ctx.rank() == PeId(0)) {
      rp = gen_permutation(stream_seed(cfg.seed, 11), n);
      cp = gen_permutation(stream_seed(cfg.seed, 12), n);
    }
    rp = ctx.broadcast(std::span<const std::int64_t>(rp));
    cp = ctx.broadcast(std::span<const std::int64_t>(cp));

    detail::PhaseMeasure phase;
    const auto b = detail::timed_phase(ctx, phase,
                                       [&] { return permute_kernel(ctx, a, rp, cp, detail::selector_for(cfg)); });
    detail::record_phase(rep, phase);

    std::uint64_t d = 0;
    for (const Entry &e : b.entries())
      d += digest(static_cast<std::uint64_t>(e.row), static_cast<std::uint64_t>(e.col));
    rep.checksum = detail::reduce_checksum(ctx, d);
    const bool nnz_kept = ctx.allreduce_sum(a.nnz_local()) == ctx.allreduce_sum(b.nnz_local());
    rep.valid = nnz_kept;
    if (!cfg.validate)
      return;
    const SerialMatrix full_a = gather_matrix(ctx, a);
    const SerialMatrix full_b = gather_matrix(ctx, b);
    if (ctx.rank() == PeId(0)) {
      const bool same = permute_oracle(full_a, rp, cp) == full_b;
      rep.validated = true;
      rep.matches_serial_oracle = same;
      rep.valid = nnz_kept && same;
      if (!rep.valid)
        rep.diagnostic = "permuted matrix differs from the serial permutation";
    }
  });
}

} // namespace fabsp::apps
