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

#include "fabsp/fabric.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

namespace fabsp {

namespace {
thread_local PeContext *tls_context = nullptr;
} // namespace

struct PeContext::ControlMessage {
  std::uint64_t seq;
  PeId sender;
  std::vector<std::byte> bytes;
};

class World {
public:
  struct Inbox {
    std::mutex mutex;
    std::deque<BufferFrame> frames;
  };
  struct ControlInbox {
    std::mutex mutex;
    std::vector<PeContext::ControlMessage> messages;
  };

  explicit World(const FabricConfig &cfg)
      : capacity(cfg.inbox_capacity), diagnostics(static_cast<std::size_t>(cfg.npes)) {
    for (int i = 0; i < cfg.npes; ++i) {
      inboxes.push_back(std::make_unique<Inbox>());
      control.push_back(std::make_unique<ControlInbox>());
    }
  }

  void fail(PeId pe, std::string what) {
    std::lock_guard lock(diag_mutex);
    diagnostics[static_cast<std::size_t>(pe.rank)] = std::move(what);
    aborted.store(true, std::memory_order_release);
  }

  std::size_t capacity;
  std::vector<std::unique_ptr<Inbox>> inboxes;
  std::vector<std::unique_ptr<ControlInbox>> control;
  std::atomic<bool> aborted{false};
  std::mutex diag_mutex;
  std::vector<std::string> diagnostics;
};

void FabricConfig::validate() const {
  if (npes < 1)
    throw UsageError("npes must be >= 1");
  if (inbox_capacity < 1)
    throw UsageError("inbox capacity must be >= 1");
}

PeContext::PeContext(World &world, PeId rank, const FabricConfig &cfg)
    : world_(world), rank_(rank), layout_(cfg.npes), config_(cfg) {}

PeContext &PeContext::current() {
  if (!tls_context)
    throw UsageError("not running inside a PE");
  return *tls_context;
}

void PeContext::check_abort() const {
  if (world_.aborted.load(std::memory_order_acquire))
    throw RunAborted("aborted: a peer PE failed");
}

bool PeContext::send_frame(PeId dest, BufferFrame &&frame) {
  if (dest.rank < 0 || dest.rank >= npes())
    throw UsageError("send_frame: destination PE out of range");
  auto &inbox = *world_.inboxes[static_cast<std::size_t>(dest.rank)];
  std::lock_guard lock(inbox.mutex);
  if (inbox.frames.size() >= world_.capacity)
    return false;
  frame.sender = rank_;
  inbox.frames.push_back(std::move(frame));
  return true;
}

std::optional<BufferFrame> PeContext::poll_frame() {
  auto &inbox = *world_.inboxes[static_cast<std::size_t>(rank_.rank)];
  std::lock_guard lock(inbox.mutex);
  if (inbox.frames.empty())
    return std::nullopt;
  BufferFrame f = std::move(inbox.frames.front());
  inbox.frames.pop_front();
  return f;
}

std::optional<BufferFrame> PeContext::poll_frame_for(std::uint32_t conveyor_id) {
  {
    auto &inbox = *world_.inboxes[static_cast<std::size_t>(rank_.rank)];
    std::lock_guard lock(inbox.mutex);
    while (!inbox.frames.empty()) {
      held_[inbox.frames.front().conveyor_id].push_back(std::move(inbox.frames.front()));
      inbox.frames.pop_front();
    }
  }
  auto it = held_.find(conveyor_id);
  if (it == held_.end() || it->second.empty())
    return std::nullopt;
  BufferFrame f = std::move(it->second.front());
  it->second.pop_front();
  if (it->second.empty())
    held_.erase(it);
  return f;
}

void PeContext::wait_until(const std::function<bool()> &ready, const char *what) {
  const auto start = std::chrono::steady_clock::now();
  while (!ready()) {
    check_abort();
    if (config_.collective_timeout.count() > 0 &&
        std::chrono::steady_clock::now() - start > config_.collective_timeout) {
      std::ostringstream os;
      os << "PE " << rank_.rank << ": " << what << " timed out (some PE never arrived)";
      throw DeadlockTimeout(os.str());
    }
    tasking::yield_now();
  }
}

void PeContext::post_control(PeId dest, std::uint64_t seq, std::vector<std::byte> bytes) {
  auto &box = *world_.control[static_cast<std::size_t>(dest.rank)];
  std::lock_guard lock(box.mutex);
  box.messages.push_back(ControlMessage{seq, rank_, std::move(bytes)});
}

std::vector<std::byte> PeContext::take_control(PeId from, std::uint64_t seq) {
  auto &box = *world_.control[static_cast<std::size_t>(rank_.rank)];
  std::vector<std::byte> out;
  wait_until(
      [&] {
        std::lock_guard lock(box.mutex);
        auto it = std::find_if(box.messages.begin(), box.messages.end(), [&](const ControlMessage &m) {
          return m.seq == seq && m.sender == from;
        });
        if (it == box.messages.end())
          return false;
        out = std::move(it->bytes);
        box.messages.erase(it);
        return true;
      },
      "collective");
  return out;
}

std::vector<std::vector<std::byte>> PeContext::gather_bytes(std::span<const std::byte> mine, PeId root) {
  const std::uint64_t seq = ++collective_seq_;
  if (rank_ != root) {
    post_control(root, seq, std::vector<std::byte>(mine.begin(), mine.end()));
    return {};
  }
  std::vector<std::vector<std::byte>> all(static_cast<std::size_t>(npes()));
  for (int r = 0; r < npes(); ++r) {
    if (PeId(r) == root)
      all[static_cast<std::size_t>(r)].assign(mine.begin(), mine.end());
    else
      all[static_cast<std::size_t>(r)] = take_control(PeId(r), seq);
  }
  return all;
}

std::vector<std::byte> PeContext::broadcast_bytes(std::span<const std::byte> data, PeId root) {
  const std::uint64_t seq = ++collective_seq_;
  if (rank_ == root) {
    for (int r = 0; r < npes(); ++r)
      if (PeId(r) != root)
        post_control(PeId(r), seq, std::vector<std::byte>(data.begin(), data.end()));
    return std::vector<std::byte>(data.begin(), data.end());
  }
  return take_control(root, seq);
}

void PeContext::barrier() {
  gather_bytes({});
  broadcast_bytes({});
}

std::int64_t PeContext::allreduce_sum(std::int64_t x) {
  return static_cast<std::int64_t>(allreduce_sum_u64(static_cast<std::uint64_t>(x)));
}

std::uint64_t PeContext::allreduce_sum_u64(std::uint64_t x) {
  auto parts = gather(std::span<const std::uint64_t>(&x, 1));
  std::uint64_t sum = 0;
  for (auto &p : parts)
    sum += p.at(0);
  return broadcast(std::span<const std::uint64_t>(&sum, 1)).at(0);
}

std::int64_t PeContext::allreduce_max(std::int64_t x) {
  auto all = allgather(x);
  return *std::max_element(all.begin(), all.end());
}

void launch_spmd(const FabricConfig &config, const std::function<void(PeContext &)> &pe_main) {
  config.validate();
  World world(config);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(config.npes));
  for (int r = 0; r < config.npes; ++r) {
    threads.emplace_back([&world, &config, &pe_main, r] {
      PeContext ctx(world, PeId(r), config);
      tls_context = &ctx;
      tasking::Scheduler sched(config.task_stack_size);
      sched.set_poll_hook([&ctx] { ctx.check_abort(); });
      try {
        tasking::finish([&] { pe_main(ctx); });
      } catch (const RunAborted &) {
        // A peer's failure, recorded by that peer.
        sched.abandon();
      } catch (const std::exception &e) {
        world.fail(PeId(r), e.what());
        sched.abandon();
      } catch (...) {
        world.fail(PeId(r), "unknown exception");
        sched.abandon();
      }
      tls_context = nullptr;
    });
  }
  for (auto &t : threads)
    t.join();
  if (world.aborted.load()) {
    std::ostringstream os;
    os << "SPMD run aborted;";
    for (std::size_t r = 0; r < world.diagnostics.size(); ++r)
      os << " [PE " << r << ": " << (world.diagnostics[r].empty() ? "unwound after peer failure" : world.diagnostics[r])
         << "]";
    throw RunAborted(os.str());
  }
}

} // namespace fabsp
