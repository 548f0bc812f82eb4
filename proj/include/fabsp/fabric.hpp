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

#ifndef FABSP_FABRIC_HPP
#define FABSP_FABRIC_HPP

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <deque>
#include <vector>

#include "fabsp/error.hpp"
#include "fabsp/tasking.hpp"

namespace fabsp {

struct PeId {
  int rank = 0;

  constexpr PeId() = default;
  constexpr explicit PeId(int r) : rank(r) {}
  friend constexpr auto operator<=>(PeId, PeId) = default;
};

/// Cyclic distribution of a global index space: index g lives on PE g mod P at
/// local offset g div P.
class PartitionedLayout {
public:
  constexpr explicit PartitionedLayout(int npes) : npes_(npes) {}

  constexpr int npes() const noexcept { return npes_; }
  constexpr PeId owner_of(std::int64_t g) const noexcept {
    return PeId(static_cast<int>(g % npes_));
  }
  constexpr std::int64_t local_of(std::int64_t g) const noexcept { return g / npes_; }
  constexpr std::int64_t global_of(PeId pe, std::int64_t local) const noexcept {
    return local * npes_ + pe.rank;
  }
  /// Number of indices of [0, global_size) owned by pe.
  constexpr std::int64_t local_size(PeId pe, std::int64_t global_size) const noexcept {
    return global_size / npes_ + (pe.rank < global_size % npes_ ? 1 : 0);
  }

private:
  int npes_;
};

enum class FrameKind : std::uint8_t { Data, Fin };

/// Unit of transport: an aggregated batch of fixed-size records for one
/// conveyor, or that conveyor's end-of-stream count.
struct BufferFrame {
  std::uint32_t conveyor_id = 0;
  PeId sender;
  FrameKind kind = FrameKind::Data;
  std::uint32_t item_count = 0;
  std::uint64_t fin_total = 0; // Fin only: items the sender pushed to this PE
  std::vector<std::byte> items;

  friend bool operator==(const BufferFrame &, const BufferFrame &) = default;
};

struct ConveyorStats {
  std::uint64_t items_pushed = 0;
  std::uint64_t items_pulled = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;

  ConveyorStats &operator+=(const ConveyorStats &o) noexcept {
    items_pushed += o.items_pushed;
    items_pulled += o.items_pulled;
    frames_sent += o.frames_sent;
    frames_received += o.frames_received;
    return *this;
  }
  friend bool operator==(const ConveyorStats &, const ConveyorStats &) = default;
};

struct FabricConfig {
  int npes = 4;
  std::size_t inbox_capacity = 64; // frames per destination inbox
  std::uint64_t seed = 0;
  /// Zero waits forever; otherwise collectives throw DeadlockTimeout.
  std::chrono::milliseconds collective_timeout{0};
  std::size_t task_stack_size = tasking::Scheduler::kDefaultStackSize;
  /// Collectively cross-check conveyor parameters at construction.
  bool debug_checks = false;

  void validate() const;
};

class World;

/// Per-PE view of the fabric. Confined to the PE's thread.
class PeContext {
public:
  PeContext(World &world, PeId rank, const FabricConfig &cfg);
  PeContext(const PeContext &) = delete;
  PeContext &operator=(const PeContext &) = delete;

  /// Context of the PE running on the calling thread.
  static PeContext &current();

  PeId rank() const noexcept { return rank_; }
  int npes() const noexcept { return layout_.npes(); }
  const PartitionedLayout &layout() const noexcept { return layout_; }
  const FabricConfig &config() const noexcept { return config_; }

  /// Moves from frame only when accepted. False means the destination inbox
  /// is full; retry after yielding.
  bool send_frame(PeId dest, BufferFrame &&frame);
  /// Next frame from this PE's inbox in arrival order.
  std::optional<BufferFrame> poll_frame();
  /// Next frame addressed to a given conveyor. Frames for other conveyors
  /// drained from the inbox meanwhile are held until their owner asks.
  std::optional<BufferFrame> poll_frame_for(std::uint32_t conveyor_id);

  /// Conveyor ids are agreed by construction order, which is collective.
  std::uint32_t next_conveyor_id() noexcept { return next_conveyor_id_++; }

  void barrier();
  std::int64_t allreduce_sum(std::int64_t x);
  std::uint64_t allreduce_sum_u64(std::uint64_t x);
  std::int64_t allreduce_max(std::int64_t x);

  /// Root receives every PE's bytes indexed by rank; others receive {}.
  std::vector<std::vector<std::byte>> gather_bytes(std::span<const std::byte> mine, PeId root = PeId(0));
  std::vector<std::byte> broadcast_bytes(std::span<const std::byte> data, PeId root = PeId(0));

  template <class T> std::vector<std::vector<T>> gather(std::span<const T> mine, PeId root = PeId(0)) {
    static_assert(std::is_trivially_copyable_v<T>);
    auto raw = gather_bytes(std::as_bytes(mine), root);
    std::vector<std::vector<T>> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      out[i].resize(raw[i].size() / sizeof(T));
      if (!raw[i].empty())
        std::memcpy(out[i].data(), raw[i].data(), raw[i].size());
    }
    return out;
  }

  template <class T> std::vector<T> broadcast(std::span<const T> data, PeId root = PeId(0)) {
    static_assert(std::is_trivially_copyable_v<T>);
    auto raw = broadcast_bytes(std::as_bytes(data), root);
    std::vector<T> out(raw.size() / sizeof(T));
    if (!raw.empty())
      std::memcpy(out.data(), raw.data(), raw.size());
    return out;
  }

  /// Every PE receives every PE's value, indexed by rank.
  template <class T> std::vector<T> allgather(const T &mine) {
    auto parts = gather(std::span<const T>(&mine, 1));
    std::vector<T> flat;
    for (auto &p : parts)
      flat.insert(flat.end(), p.begin(), p.end());
    return broadcast(std::span<const T>(flat));
  }

  /// Running totals of every conveyor this PE has retired.
  ConveyorStats &conveyor_totals() noexcept { return totals_; }

  /// Throws RunAborted if any PE has failed.
  void check_abort() const;

  struct ControlMessage;

private:
  void post_control(PeId dest, std::uint64_t seq, std::vector<std::byte> bytes);
  std::vector<std::byte> take_control(PeId from, std::uint64_t seq);
  void wait_until(const std::function<bool()> &ready, const char *what);

  World &world_;
  PeId rank_;
  PartitionedLayout layout_;
  FabricConfig config_;
  std::uint32_t next_conveyor_id_ = 0;
  std::uint64_t collective_seq_ = 0;
  std::unordered_map<std::uint32_t, std::deque<BufferFrame>> held_;
  ConveyorStats totals_;
};

/// Runs pe_main on config.npes PE threads and returns once all exit. If any
/// PE throws, every PE is unwound and RunAborted is thrown with each PE's
/// diagnostic.
void launch_spmd(const FabricConfig &config, const std::function<void(PeContext &)> &pe_main);

} // namespace fabsp

#endif
