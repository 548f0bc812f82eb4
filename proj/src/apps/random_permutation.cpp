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
#include <bit>
#include <random>

#include "fabsp/apps/kernels.hpp"
#include "fabsp/apps/oracles.hpp"
#include "run_support.hpp"

namespace fabsp::apps {

namespace {
constexpr std::uint64_t kDartStreamBase = 0xda27'0000'0000ULL;

struct Dart {
  std::int64_t id;
  std::int64_t slot; // local slot on the owner; unused in a rejection
};
enum DartMailbox : std::size_t { Throw, Reject };
} // namespace

std::int64_t dart_round_cap(std::int64_t m) noexcept {
  const auto bits = m <= 1 ? 0 : static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(m - 1)));
  return 10 * bits + 50;
}

Rng dart_stream(std::uint64_t seed, int rank) {
  return Rng(stream_seed(seed, kDartStreamBase + static_cast<std::uint64_t>(rank)));
}

RandomPermutationResult random_permutation_kernel(PeContext &ctx, std::int64_t elements_per_pe, std::uint64_t seed,
                                                  const SelectorOptions &opts) {
  if (elements_per_pe < 0)
    throw UsageError("elements_per_pe must be non-negative");
  const PartitionedLayout &layout = ctx.layout();
  const std::int64_t m = elements_per_pe * ctx.npes();
  const std::int64_t slots = kDartTargetFactor * m;
  std::vector<std::int64_t> target(static_cast<std::size_t>(layout.local_size(ctx.rank(), slots)), -1);

  std::vector<std::int64_t> unplaced(static_cast<std::size_t>(elements_per_pe));
  for (std::int64_t i = 0; i < elements_per_pe; ++i)
    unplaced[static_cast<std::size_t>(i)] = ctx.rank().rank * elements_per_pe + i;

  RandomPermutationResult out;
  Rng rng = dart_stream(seed, ctx.rank().rank);
  const std::int64_t cap = dart_round_cap(m);
  while (ctx.allreduce_sum(static_cast<std::int64_t>(unplaced.size())) > 0) {
    if (out.rounds == cap) {
      out.hit_round_cap = true;
      break;
    }
    ++out.rounds;
    std::uniform_int_distribution<std::int64_t> pick(0, slots - 1);
    std::vector<std::int64_t> draws;
    draws.reserve(unplaced.size());
    for (std::size_t i = 0; i < unplaced.size(); ++i)
      draws.push_back(pick(rng));

    std::vector<std::int64_t> rejected;
    Selector<Dart> sel(ctx, 2, opts);
    sel.mailbox(Throw).process = [&](const Dart &d, PeId from) {
      auto &t = target[static_cast<std::size_t>(d.slot)];
      if (t == -1)
        t = d.id;
      else
        sel.send(Reject, from, Dart{d.id, -1});
    };
    sel.mailbox(Reject).process = [&](const Dart &d, PeId) { rejected.push_back(d.id); };
    sel.start();
    for (std::size_t i = 0; i < unplaced.size(); ++i)
      sel.send(Throw, layout.owner_of(draws[i]), Dart{unplaced[i], layout.local_of(draws[i])});
    sel.done(Throw);
    sel.wait();
    std::sort(rejected.begin(), rejected.end());
    unplaced = std::move(rejected);
  }
  for (std::int64_t t : target)
    if (t != -1)
      out.block.push_back(t);
  return out;
}

AppReport run_random_permutation(const AppConfig &cfg) {
  return detail::launch_app(cfg, [&](PeContext &ctx, AppReport &rep) {
    const std::int64_t m = cfg.elements_per_pe * ctx.npes();
    detail::PhaseMeasure phase;
    const auto res = detail::timed_phase(ctx, phase, [&] {
      return random_permutation_kernel(ctx, cfg.elements_per_pe, cfg.seed, detail::selector_for(cfg));
    });
    detail::record_phase(rep, phase);
    rep.rounds = res.rounds;

    // Output position of the block's first value.
    const auto lengths = ctx.allgather(static_cast<std::int64_t>(res.block.size()));
    std::int64_t offset = 0;
    for (int r = 0; r < ctx.rank().rank; ++r)
      offset += lengths[static_cast<std::size_t>(r)];
    std::uint64_t local_digest = 0;
    for (std::size_t i = 0; i < res.block.size(); ++i)
      local_digest += digest(static_cast<std::uint64_t>(offset) + i, static_cast<std::uint64_t>(res.block[i]));
    rep.checksum = detail::reduce_checksum(ctx, local_digest);
    const bool sizes_ok = ctx.allreduce_sum(static_cast<std::int64_t>(res.block.size())) == m;
    rep.valid = sizes_ok && !res.hit_round_cap;
    if (res.hit_round_cap)
      rep.diagnostic = "round cap reached with darts still unplaced";
    if (!cfg.validate)
      return;
    const auto blocks = ctx.gather(std::span<const std::int64_t>(res.block));
    if (ctx.rank() == PeId(0)) {
      std::vector<std::int64_t> perm;
      for (const auto &b : blocks)
        perm.insert(perm.end(), b.begin(), b.end());
      const bool is_perm = static_cast<std::int64_t>(perm.size()) == m && is_permutation_of_range(perm);
      rep.validated = true;
      if (ctx.npes() == 1) {
        const auto replay = random_permutation_single_pe(cfg.seed, m);
        rep.matches_serial_oracle = replay.permutation == perm && replay.rounds == res.rounds;
      }
      rep.valid = rep.valid && is_perm;
      if (!is_perm)
        rep.diagnostic = "concatenated blocks are not a permutation of [0, m)";
    }
  });
}

} // namespace fabsp::apps
