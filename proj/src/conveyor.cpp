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

#include "fabsp/conveyor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fabsp {

namespace {

void check_begin_parameters(PeContext &ctx, std::uint32_t id, std::size_t item_size, std::size_t buffer_items) {
  struct Params {
    std::uint64_t id, item_size, buffer_items;
  };
  const Params mine{id, item_size, buffer_items};
  for (const Params &p : ctx.allgather(mine))
    if (p.id != mine.id || p.item_size != mine.item_size || p.buffer_items != mine.buffer_items)
      throw UsageError("conveyor parameters differ across PEs");
}

} // namespace

Conveyor::Conveyor(PeContext &ctx, std::size_t item_size, std::size_t buffer_items)
    : Conveyor(ctx, ctx.next_conveyor_id(), item_size, buffer_items) {}

Conveyor::Conveyor(PeContext &ctx, std::uint32_t id, std::size_t item_size, std::size_t buffer_items)
    : ctx_(ctx), id_(id), item_size_(item_size), buffer_items_(buffer_items) {
  if (item_size == 0)
    throw UsageError("conveyor item size must be positive");
  if (buffer_items == 0)
    throw UsageError("conveyor buffer capacity must be positive");
  if (ctx.config().debug_checks)
    check_begin_parameters(ctx, id, item_size, buffer_items);
  const auto p = static_cast<std::size_t>(ctx.npes());
  send_.resize(p);
  sent_counts_.assign(p, 0);
  fin_pending_.assign(p, false);
  received_counts_.assign(p, 0);
  fin_totals_.assign(p, std::nullopt);
}

Conveyor::~Conveyor() { ctx_.conveyor_totals() += stats_; }

bool Conveyor::push(PeId dest, std::span<const std::byte> item) {
  if (locally_done_)
    throw UsageError("conveyor push after local done");
  if (item.size() != item_size_)
    throw UsageError("conveyor push with wrong item size");
  if (dest.rank < 0 || dest.rank >= ctx_.npes())
    throw UsageError("conveyor push to PE out of range");
  const auto d = static_cast<std::size_t>(dest.rank);
  SendBuffer &buf = send_[d];
  if (buf.items == buffer_items_ && !flush(d))
    return false;
  if (buf.bytes.empty())
    buf.bytes.reserve(buffer_items_ * item_size_);
  buf.bytes.insert(buf.bytes.end(), item.begin(), item.end());
  ++buf.items;
  ++sent_counts_[d];
  ++stats_.items_pushed;
  return true;
}

bool Conveyor::flush(std::size_t dest) {
  SendBuffer &buf = send_[dest];
  BufferFrame frame;
  frame.conveyor_id = id_;
  frame.kind = FrameKind::Data;
  frame.item_count = static_cast<std::uint32_t>(buf.items);
  frame.items = std::move(buf.bytes);
  if (!ctx_.send_frame(PeId(static_cast<int>(dest)), std::move(frame))) {
    buf.bytes = std::move(frame.items);
    return false;
  }
  buf.bytes = {};
  buf.items = 0;
  ++stats_.frames_sent;
  return true;
}

std::optional<Conveyor::Pulled> Conveyor::pull() {
  while (!recv_.empty() && recv_cursor_ == recv_.front().item_count) {
    recv_.pop_front();
    recv_cursor_ = 0;
  }
  if (recv_.empty())
    return std::nullopt;
  const BufferFrame &f = recv_.front();
  Pulled out{std::span<const std::byte>(f.items).subspan(recv_cursor_ * item_size_, item_size_), f.sender};
  ++recv_cursor_;
  --recv_items_waiting_;
  ++stats_.items_pulled;
  return out;
}

void Conveyor::receive() {
  while (auto frame = ctx_.poll_frame_for(id_)) {
    ++stats_.frames_received;
    const auto s = static_cast<std::size_t>(frame->sender.rank);
    if (frame->kind == FrameKind::Fin) {
      if (fin_totals_[s])
        throw std::logic_error("conveyor: duplicate fin frame");
      fin_totals_[s] = frame->fin_total;
      ++fins_received_;
    } else {
      if (frame->items.size() != std::size_t{frame->item_count} * item_size_)
        throw std::logic_error("conveyor: malformed data frame");
      received_counts_[s] += frame->item_count;
      recv_items_waiting_ += frame->item_count;
      recv_.push_back(std::move(*frame));
    }
    if (fin_totals_[s] && received_counts_[s] > *fin_totals_[s]) {
      std::ostringstream os;
      os << "conveyor " << id_ << ": PE " << s << " delivered more items than it declared";
      throw std::logic_error(os.str());
    }
  }
}

bool Conveyor::completion_reached() const {
  if (phase_ != Phase::Endgame || recv_items_waiting_ != 0 || fins_received_ != fin_totals_.size())
    return false;
  for (std::size_t d = 0; d < send_.size(); ++d)
    if (send_[d].items != 0 || fin_pending_[d] || received_counts_[d] != *fin_totals_[d])
      return false;
  return true;
}

bool Conveyor::advance(bool locally_done) {
  if (phase_ == Phase::Complete)
    throw UsageError("conveyor advanced after completion");
  if (locally_done_ && !locally_done)
    throw UsageError("conveyor done flag regressed from true to false");
  if (locally_done && !locally_done_) {
    locally_done_ = true;
    phase_ = Phase::Endgame;
    std::fill(fin_pending_.begin(), fin_pending_.end(), true);
  }

  for (std::size_t d = 0; d < send_.size(); ++d) {
    SendBuffer &buf = send_[d];
    if (buf.items == buffer_items_ || (phase_ == Phase::Endgame && buf.items > 0))
      flush(d);
    if (fin_pending_[d] && buf.items == 0) {
      BufferFrame fin;
      fin.conveyor_id = id_;
      fin.kind = FrameKind::Fin;
      fin.fin_total = sent_counts_[d];
      if (ctx_.send_frame(PeId(static_cast<int>(d)), std::move(fin))) {
        fin_pending_[d] = false;
        ++stats_.frames_sent;
      }
    }
  }

  receive();

  if (completion_reached()) {
    phase_ = Phase::Complete;
    return false;
  }
  return true;
}

} // namespace fabsp
