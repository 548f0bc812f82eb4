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
struct PeelMessage {
  std::int64_t local; // column on a claim, row on a decrement
  std::int64_t value; // position on a claim, column on a decrement
};
enum PeelMailbox : std::size_t { ClaimBox, DecrementBox };
} // namespace

ToposortResult toposort_kernel(PeContext &ctx, const SparseMatrixPartition &scrambled, const SelectorOptions &opts) {
  const std::int64_t n = scrambled.nrows_global();
  if (scrambled.ncols_global() != n)
    throw UsageError("topological sort needs a square matrix");
  const PartitionedLayout &layout = ctx.layout();
  const PeId me = ctx.rank();
  const SparseMatrixPartition by_col = transpose_kernel(ctx, scrambled, opts);

  const auto nlocal = static_cast<std::size_t>(scrambled.local_rows());
  ToposortResult out;
  out.row_position.assign(nlocal, -1);
  out.col_position.assign(static_cast<std::size_t>(by_col.local_rows()), -1);
  std::vector<std::int64_t> live(nlocal), colsum(nlocal, 0);
  std::vector<bool> placed(nlocal, false);
  std::vector<std::int64_t> ready; // local rows, ascending
  for (std::size_t l = 0; l < nlocal; ++l) {
    const auto row = scrambled.row(static_cast<std::int64_t>(l));
    live[l] = static_cast<std::int64_t>(row.size());
    for (std::int64_t c : row)
      colsum[l] += c;
    if (live[l] == 1)
      ready.push_back(static_cast<std::int64_t>(l));
  }

  std::int64_t top = n - 1, remaining = n;
  bool conflict = false;
  for (;;) {
    const auto counts = ctx.allgather(static_cast<std::int64_t>(ready.size()));
    std::int64_t total = 0, before = 0;
    for (int r = 0; r < ctx.npes(); ++r) {
      if (r < me.rank)
        before += counts[static_cast<std::size_t>(r)];
      total += counts[static_cast<std::size_t>(r)];
    }
    if (total == 0) {
      out.stalled = remaining > 0;
      break;
    }
    ++out.rounds;
    for (std::size_t i = 0; i < ready.size(); ++i) {
      const auto l = static_cast<std::size_t>(ready[i]);
      out.row_position[l] = top - before - static_cast<std::int64_t>(i);
      placed[l] = true;
    }

    std::vector<std::int64_t> next;
    Selector<PeelMessage> sel(ctx, 2, opts);
    sel.mailbox(ClaimBox).process = [&](const PeelMessage &m, PeId) {
      auto &cp = out.col_position[static_cast<std::size_t>(m.local)];
      if (cp != -1) {
        conflict = true;
        return;
      }
      cp = m.value;
      const std::int64_t c = layout.global_of(me, m.local);
      for (std::int64_t r : by_col.row(m.local))
        sel.send(DecrementBox, layout.owner_of(r), PeelMessage{layout.local_of(r), c});
    };
    sel.mailbox(DecrementBox).process = [&](const PeelMessage &m, PeId) {
      const auto l = static_cast<std::size_t>(m.local);
      if (placed[l])
        return;
      colsum[l] -= m.value;
      if (--live[l] == 1)
        next.push_back(m.local);
    };
    sel.start();
    for (std::int64_t l : ready) {
      const std::int64_t c = colsum[static_cast<std::size_t>(l)];
      sel.send(ClaimBox, layout.owner_of(c),
               PeelMessage{layout.local_of(c), out.row_position[static_cast<std::size_t>(l)]});
    }
    sel.done(ClaimBox);
    sel.wait();

    top -= total;
    remaining -= total;
    std::sort(next.begin(), next.end());
    ready = std::move(next);
  }
  out.conflict = ctx.allreduce_max(conflict ? 1 : 0) != 0;
  return out;
}

AppReport run_topological_sort(const AppConfig &cfg) {
  return detail::launch_app(cfg, [&](PeContext &ctx, AppReport &rep) {
    const std::int64_t n = cfg.rows_per_pe * ctx.npes();
    const auto scramble = gen_scramble(cfg.seed, n);
    const auto a = gen_scrambled_triangular(cfg.seed, n, cfg.nnz_per_row, scramble, ctx.layout(), ctx.rank());

    detail::PhaseMeasure phase;
    const auto res =
        detail::timed_phase(ctx, phase, [&] { return toposort_kernel(ctx, a, detail::selector_for(cfg)); });
    detail::record_phase(rep, phase);
    rep.rounds = res.rounds;

    std::uint64_t local_digest = 0;
    for (std::size_t l = 0; l < res.row_position.size(); ++l)
      local_digest += digest(static_cast<std::uint64_t>(a.global_row(static_cast<std::int64_t>(l))),
                             static_cast<std::uint64_t>(res.row_position[l]));
    for (std::size_t l = 0; l < res.col_position.size(); ++l)
      local_digest += digest(static_cast<std::uint64_t>(n + ctx.layout().global_of(ctx.rank(), static_cast<std::int64_t>(l))),
                             static_cast<std::uint64_t>(res.col_position[l]));
    rep.checksum = detail::reduce_checksum(ctx, local_digest);
    rep.valid = !res.stalled && !res.conflict;
    if (res.stalled)
      rep.diagnostic = "peeling stalled: no row with a single live nonzero";
    else if (res.conflict)
      rep.diagnostic = "two rows claimed the same column";
    if (!cfg.validate)
      return;
    const SerialMatrix full = gather_matrix(ctx, a);
    const auto rows = gather_cyclic(ctx, res.row_position, n);
    const auto cols = gather_cyclic(ctx, res.col_position, n);
    if (ctx.rank() == PeId(0)) {
      const bool triangular = is_unit_upper_triangular_under(full, rows, cols);
      rep.validated = true;
      if (ctx.npes() == 1) {
        const auto replay = toposort_single_pe(full);
        rep.matches_serial_oracle = replay.row_position == rows && replay.col_position == cols &&
                                    replay.rounds == res.rounds && replay.ok == rep.valid;
      }
      if (rep.valid && !triangular)
        rep.diagnostic = "positions do not give an upper-triangular matrix";
      rep.valid = rep.valid && triangular;
    }
  });
}

} // namespace fabsp::apps
