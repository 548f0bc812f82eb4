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

#ifndef FABSP_CONVEYOR_HPP
#define FABSP_CONVEYOR_HPP

// Message aggregation with bounded per-destination buffers.
//
// push() appends a fixed-size record to the buffer for its destination; a
// full buffer is shipped to the transport as one Data frame. pull() hands out
// received records one at a time. advance() moves data in both directions and
// runs termination detection:
//
//   * the first advance(true) switches the conveyor to Endgame and schedules a
//     Fin(total_sent_to_d) frame for every PE d, self included;
//   * in Endgame partial buffers are flushed too;
//   * the conveyor is Complete once every buffer and Fin has been accepted by
//     the transport, a Fin has arrived from every PE, the item count received
//     from each sender equals its Fin total, and every item has been pulled.
//
// None of this relies on frame ordering. Complete on one PE therefore means
// that every item addressed to it anywhere has been delivered and consumed.

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "fabsp/fabric.hpp"

namespace fabsp {

class Conveyor {
public:
  static constexpr std::size_t kDefaultBufferItems = 1024;

  enum class Phase { Active, Endgame, Complete };

  struct Pulled {
    std::span<const std::byte> item; // valid until the next pull()
    PeId from;
  };

  /// Collective: every PE must construct its conveyors in the same order with
  /// the same item_size and buffer_items.
  Conveyor(PeContext &ctx, std::size_t item_size, std::size_t buffer_items = kDefaultBufferItems);
  /// As above with an explicitly agreed id.
  Conveyor(PeContext &ctx, std::uint32_t id, std::size_t item_size, std::size_t buffer_items);
  Conveyor(const Conveyor &) = delete;
  Conveyor &operator=(const Conveyor &) = delete;
  ~Conveyor();

  /// False means nothing changed: the destination buffer is full and the
  /// transport refused it. Throws UsageError once the local done was given.
  bool push(PeId dest, std::span<const std::byte> item);

  template <class T> bool push(PeId dest, const T &item) {
    static_assert(std::is_trivially_copyable_v<T>);
    return push(dest, std::as_bytes(std::span<const T>(&item, 1)));
  }

  std::optional<Pulled> pull();

  template <class T> std::optional<std::pair<T, PeId>> pull_as() {
    static_assert(std::is_trivially_copyable_v<T>);
    auto p = pull();
    if (!p)
      return std::nullopt;
    T value;
    std::memcpy(&value, p->item.data(), sizeof(T));
    return std::pair<T, PeId>(value, p->from);
  }

  /// Returns false exactly once, on reaching Complete. Once locally_done has
  /// been passed as true it must stay true.
  bool advance(bool locally_done);

  std::uint32_t id() const noexcept { return id_; }
  std::size_t item_size() const noexcept { return item_size_; }
  std::size_t buffer_items() const noexcept { return buffer_items_; }
  Phase phase() const noexcept { return phase_; }
  const ConveyorStats &stats() const noexcept { return stats_; }

private:
  struct SendBuffer {
    std::vector<std::byte> bytes;
    std::size_t items = 0;
  };

  bool flush(std::size_t dest);
  void receive();
  bool completion_reached() const;

  PeContext &ctx_;
  std::uint32_t id_;
  std::size_t item_size_;
  std::size_t buffer_items_;
  Phase phase_ = Phase::Active;
  bool locally_done_ = false;

  std::vector<SendBuffer> send_;
  std::vector<std::uint64_t> sent_counts_;
  std::vector<bool> fin_pending_;

  std::deque<BufferFrame> recv_;
  std::size_t recv_cursor_ = 0; // next item within recv_.front()
  std::uint64_t recv_items_waiting_ = 0;
  std::vector<std::uint64_t> received_counts_;
  std::vector<std::optional<std::uint64_t>> fin_totals_;
  std::size_t fins_received_ = 0;

  ConveyorStats stats_;
};

} // namespace fabsp

#endif
