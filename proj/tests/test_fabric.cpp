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

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <vector>

#include "fabsp/fabric.hpp"

using namespace fabsp;

namespace {

BufferFrame make_frame(std::uint64_t value) {
  BufferFrame f;
  f.conveyor_id = 9;
  f.item_count = 1;
  f.items.resize(sizeof(value));
  std::memcpy(f.items.data(), &value, sizeof(value));
  return f;
}

std::uint64_t frame_value(const BufferFrame &f) {
  std::uint64_t v;
  std::memcpy(&v, f.items.data(), sizeof(v));
  return v;
}

} // namespace

TEST_CASE("cyclic layout formulas") {
  PartitionedLayout layout(4);
  CHECK(layout.owner_of(5) == PeId(1));
  CHECK(layout.local_of(5) == 1);
  for (int p = 1; p <= 16; ++p) {
    PartitionedLayout l(p);
    CHECK(l.owner_of(0) == PeId(0));
    CHECK(l.local_of(0) == 0);
  }
}

TEST_CASE("layout round trip is exhaustive at small scale") {
  for (int p = 1; p <= 16; ++p) {
    PartitionedLayout l(p);
    std::vector<std::int64_t> per_pe(static_cast<std::size_t>(p), 0);
    for (std::int64_t g = 0; g < 10000; ++g) {
      REQUIRE(l.global_of(l.owner_of(g), l.local_of(g)) == g);
      ++per_pe[static_cast<std::size_t>(l.owner_of(g).rank)];
    }
    for (int r = 0; r < p; ++r)
      CHECK(l.local_size(PeId(r), 10000) == per_pe[static_cast<std::size_t>(r)]);
  }
}

TEST_CASE("launch with one PE returns") {
  int calls = 0;
  launch_spmd({.npes = 1}, [&](PeContext &ctx) {
    CHECK(ctx.rank() == PeId(0));
    ++calls;
  });
  CHECK(calls == 1);
}

TEST_CASE("launch runs every rank once") {
  std::mutex m;
  std::multiset<int> ranks;
  launch_spmd({.npes = 4}, [&](PeContext &ctx) {
    std::lock_guard lock(m);
    ranks.insert(ctx.rank().rank);
  });
  CHECK(ranks == std::multiset<int>{0, 1, 2, 3});
}

TEST_CASE("rank sends reach PE 0") {
  std::atomic<int> received{0};
  launch_spmd({.npes = 8, .inbox_capacity = 2}, [&](PeContext &ctx) {
    if (ctx.rank() != PeId(0)) {
      BufferFrame f = make_frame(static_cast<std::uint64_t>(ctx.rank().rank));
      while (!ctx.send_frame(PeId(0), std::move(f)))
        tasking::yield_now();
    } else {
      std::set<std::uint64_t> from;
      while (from.size() < 7) {
        if (auto f = ctx.poll_frame()) {
          CHECK(frame_value(*f) == static_cast<std::uint64_t>(f->sender.rank));
          from.insert(frame_value(*f));
        } else {
          tasking::yield_now();
        }
      }
      received = static_cast<int>(from.size());
      CHECK_FALSE(ctx.poll_frame().has_value());
    }
  });
  CHECK(received == 7);
}

TEST_CASE("self send and bounded inbox") {
  launch_spmd({.npes = 1, .inbox_capacity = 3}, [](PeContext &ctx) {
    BufferFrame f = make_frame(77);
    REQUIRE(ctx.send_frame(ctx.rank(), BufferFrame(f)));
    auto got = ctx.poll_frame();
    REQUIRE(got);
    f.sender = ctx.rank();
    CHECK(*got == f);
    CHECK_FALSE(ctx.poll_frame());

    for (int i = 0; i < 3; ++i)
      REQUIRE(ctx.send_frame(ctx.rank(), make_frame(static_cast<std::uint64_t>(i))));
    BufferFrame extra = make_frame(99);
    CHECK_FALSE(ctx.send_frame(ctx.rank(), std::move(extra)));
    // Refused frames are left intact for the retry.
    CHECK(frame_value(extra) == 99);
  });
}

TEST_CASE("frame storm: exactly-once delivery and per-pair FIFO") {
  constexpr int P = 4;
  constexpr int kFramesPerPe = 2500; // 10,000 total
  struct Record {
    std::uint64_t sender, dest, seq;
    auto operator<=>(const Record &) const = default;
  };
  std::vector<Record> sent_all, polled_all;
  std::mutex m;
  launch_spmd({.npes = P, .inbox_capacity = 8}, [&](PeContext &ctx) {
    std::mt19937_64 rng(1234 + static_cast<std::uint64_t>(ctx.rank().rank));
    std::uniform_int_distribution<int> pick(0, P - 1);
    std::vector<int> dests(kFramesPerPe);
    std::vector<std::int64_t> per_dest(P, 0);
    for (auto &d : dests) {
      d = pick(rng);
      ++per_dest[static_cast<std::size_t>(d)];
    }
    std::int64_t expected = 0;
    for (int d = 0; d < P; ++d) {
      auto counts = ctx.allgather(per_dest[static_cast<std::size_t>(d)]);
      if (d == ctx.rank().rank)
        for (auto c : counts)
          expected += c;
    }
    std::vector<Record> sent, polled;
    std::vector<std::uint64_t> next_seq(P, 0);
    std::vector<std::int64_t> last_seen(P, -1);
    std::size_t i = 0;
    auto poll_some = [&] {
      while (auto f = ctx.poll_frame()) {
        std::uint64_t v = frame_value(*f);
        const auto s = static_cast<std::size_t>(f->sender.rank);
        CHECK(static_cast<std::int64_t>(v) > last_seen[s]);
        last_seen[s] = static_cast<std::int64_t>(v);
        polled.push_back({s, static_cast<std::uint64_t>(ctx.rank().rank), v});
      }
    };
    while (i < dests.size() || static_cast<std::int64_t>(polled.size()) < expected) {
      if (i < dests.size()) {
        const auto d = static_cast<std::size_t>(dests[i]);
        if (ctx.send_frame(PeId(dests[i]), make_frame(next_seq[d]))) {
          sent.push_back({static_cast<std::uint64_t>(ctx.rank().rank), d, next_seq[d]});
          ++next_seq[d];
          ++i;
        }
      }
      poll_some();
      tasking::yield_now();
    }
    ctx.barrier();
    poll_some();
    std::lock_guard lock(m);
    sent_all.insert(sent_all.end(), sent.begin(), sent.end());
    polled_all.insert(polled_all.end(), polled.begin(), polled.end());
  });
  REQUIRE(sent_all.size() == P * kFramesPerPe);
  std::sort(sent_all.begin(), sent_all.end());
  std::sort(polled_all.begin(), polled_all.end());
  CHECK(sent_all == polled_all);
}

TEST_CASE("barrier: every increment is visible after it") {
  std::atomic<int> counter{0};
  launch_spmd({.npes = 8}, [&](PeContext &ctx) {
    for (int round = 1; round <= 3; ++round) {
      counter.fetch_add(1);
      ctx.barrier();
      CHECK(counter.load() == 8 * round);
      ctx.barrier();
    }
  });
}

TEST_CASE("allreduce_sum") {
  launch_spmd({.npes = 4}, [](PeContext &ctx) { CHECK(ctx.allreduce_sum(1) == 4); });
  launch_spmd({.npes = 1}, [](PeContext &ctx) { CHECK(ctx.allreduce_sum(7) == 7); });
  launch_spmd({.npes = 8}, [](PeContext &ctx) { CHECK(ctx.allreduce_sum(ctx.rank().rank) == 28); });
}

TEST_CASE("gather, broadcast and allgather") {
  launch_spmd({.npes = 5}, [](PeContext &ctx) {
    std::vector<int> mine(static_cast<std::size_t>(ctx.rank().rank), ctx.rank().rank);
    auto parts = ctx.gather(std::span<const int>(mine), PeId(2));
    if (ctx.rank() == PeId(2)) {
      REQUIRE(parts.size() == 5);
      for (int r = 0; r < 5; ++r)
        CHECK(parts[static_cast<std::size_t>(r)] == std::vector<int>(static_cast<std::size_t>(r), r));
    } else {
      CHECK(parts.empty());
    }
    std::vector<double> root_data{1.5, 2.5};
    auto b = ctx.broadcast(std::span<const double>(ctx.rank() == PeId(0) ? root_data : std::vector<double>{}));
    CHECK(b == root_data);
    auto all = ctx.allgather(ctx.rank().rank * 10);
    CHECK(all == std::vector<int>{0, 10, 20, 30, 40});
    CHECK(ctx.allreduce_max(ctx.rank().rank) == 4);
  });
}

TEST_CASE("a failing PE aborts the run with its diagnostic") {
  try {
    launch_spmd({.npes = 4}, [](PeContext &ctx) {
      if (ctx.rank() == PeId(2))
        throw std::runtime_error("bad input on 2");
      ctx.barrier(); // the others would wait here forever without abort
    });
    FAIL("expected RunAborted");
  } catch (const RunAborted &e) {
    std::string what = e.what();
    CHECK(what.find("PE 2: bad input on 2") != std::string::npos);
  }
}

TEST_CASE("barrier with a missing PE times out in test mode") {
  FabricConfig cfg{.npes = 2, .collective_timeout = std::chrono::milliseconds(200)};
  CHECK_THROWS_AS(launch_spmd(cfg,
                              [](PeContext &ctx) {
                                if (ctx.rank() == PeId(0))
                                  ctx.barrier();
                              }),
                  RunAborted);
}

TEST_CASE("invalid fabric config") {
  CHECK_THROWS_AS(launch_spmd({.npes = 0}, [](PeContext &) {}), UsageError);
  CHECK_THROWS_AS(launch_spmd({.npes = 2, .inbox_capacity = 0}, [](PeContext &) {}), UsageError);
}
