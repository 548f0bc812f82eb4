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

#ifndef FABSP_SELECTOR_HPP
#define FABSP_SELECTOR_HPP

// Selectors: actors with several partitioned global mailboxes.
//
// Every PE holds one partition of each mailbox. send() never talks to the
// network directly; it appends a packet to the mailbox's local ring and the
// mailbox's communication task (one per mailbox per PE) moves packets into a
// conveyor, pulls whatever arrived and runs the handler on it. done() appends
// a marker to the ring, so every earlier send from this PE precedes it.
//
// Termination follows the selector's TerminationGraph. The user calls done()
// only on mailboxes fed from Outside; once a mailbox completes on a PE (its
// conveyor reached Complete, so all of its partitions everywhere are drained)
// its outgoing edges are removed on that PE, and a successor with no
// remaining incoming edges is closed by the runtime.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/circular_buffer.hpp>

#include "fabsp/conveyor.hpp"
#include "fabsp/fabric.hpp"
#include "fabsp/tasking.hpp"
#include "fabsp/termination_graph.hpp"

namespace fabsp {

struct SelectorOptions {
  std::size_t ring_capacity = 64;                           // packets per mailbox ring
  std::size_t buffer_items = Conveyor::kDefaultBufferItems; // conveyor buffer per destination
};

template <class T> class Selector {
  static_assert(std::is_trivially_copyable_v<T>, "mailbox payloads are fixed-size records");

public:
  using Handler = std::function<void(const T &, PeId)>;

  struct Mailbox {
    Handler process;

  private:
    friend class Selector;
    struct Packet {
      T payload;
      PeId dest;
      bool done_marker;
    };

    explicit Mailbox(std::size_t ring_capacity) : ring(ring_capacity) {}

    boost::circular_buffer<Packet> ring;
    std::unique_ptr<Conveyor> conveyor;
    std::size_t open_edges = 0; // incoming edges not yet removed on this PE
    bool user_done = false;
    bool closed = false; // done marker enqueued
    tasking::Promise<bool> completion;
  };

  Selector(PeContext &ctx, TerminationGraph graph, SelectorOptions options = {})
      : ctx_(ctx), graph_(std::move(graph)), options_(options) {
    graph_.validate();
    if (options_.ring_capacity == 0)
      throw UsageError("mailbox ring capacity must be positive");
    mailboxes_.reserve(graph_.size());
    for (std::size_t i = 0; i < graph_.size(); ++i) {
      mailboxes_.emplace_back(Mailbox(options_.ring_capacity));
      mailboxes_.back().open_edges = graph_.predecessors(static_cast<int>(i)).size();
    }
  }

  /// N mailboxes chained Outside -> 0 -> ... -> N-1.
  Selector(PeContext &ctx, std::size_t mailboxes, SelectorOptions options = {})
      : Selector(ctx, TerminationGraph::linear(mailboxes), options) {}

  Selector(const Selector &) = delete;
  Selector &operator=(const Selector &) = delete;
  virtual ~Selector() = default;

  Mailbox &mailbox(std::size_t id) { return mailboxes_.at(id); }
  std::size_t mailbox_count() const noexcept { return mailboxes_.size(); }
  const TerminationGraph &graph() const noexcept { return graph_; }
  PeContext &context() noexcept { return ctx_; }

  /// Collective. Begins one conveyor per mailbox and spawns the mailbox
  /// communication tasks into the caller's current finish scope.
  void start() {
    if (started_)
      throw UsageError("selector started twice");
    for (std::size_t i = 0; i < mailboxes_.size(); ++i)
      if (!mailboxes_[i].process)
        throw UsageError("mailbox " + std::to_string(i) + " has no handler");
    started_ = true;
    for (auto &m : mailboxes_)
      m.conveyor = std::make_unique<Conveyor>(ctx_, sizeof(T), options_.buffer_items);
    for (std::size_t i = 0; i < mailboxes_.size(); ++i)
      tasking::spawn([this, i] { worker_loop(i); });
    for (std::size_t i = 0; i < mailboxes_.size(); ++i)
      if (mailboxes_[i].open_edges == 0)
        close(i);
  }

  /// Never drops a message. A full ring hands control to the communication
  /// tasks until space frees up.
  void send(std::size_t mbx, PeId dest, const T &msg) {
    Mailbox &m = mailbox(mbx);
    if (!started_)
      throw UsageError("send on a selector that has not been started");
    if (m.closed)
      throw UsageError("send to mailbox " + std::to_string(mbx) + " after done");
    if (dest.rank < 0 || dest.rank >= ctx_.npes())
      throw UsageError("send to PE out of range");
    wait_for_ring_space(mbx);
    m.ring.push_back(typename Mailbox::Packet{msg, dest, false});
    ++sends_;
  }

  /// Declares that this PE will not send to mbx again. Only valid for
  /// mailboxes fed from Outside; the runtime closes the others.
  void done(std::size_t mbx) {
    Mailbox &m = mailbox(mbx);
    if (!started_)
      throw UsageError("done on a selector that has not been started");
    if (!graph_.fed_from_outside(static_cast<int>(mbx)))
      throw UsageError("mailbox " + std::to_string(mbx) +
                       " has no Outside predecessor; its done is issued by the runtime");
    if (m.user_done)
      throw UsageError("done called twice on mailbox " + std::to_string(mbx));
    m.user_done = true;
    if (--m.open_edges == 0)
      close(mbx);
  }

  /// Filled once every mailbox has completed on this PE.
  tasking::Future<bool> completion() const { return all_done_.get_future(); }
  tasking::Future<bool> completion(std::size_t mbx) const { return mailboxes_.at(mbx).completion.get_future(); }
  bool complete() const noexcept { return all_done_.filled(); }
  void wait() const { completion().wait(); }

  ConveyorStats stats() const {
    ConveyorStats s;
    for (const auto &m : mailboxes_)
      if (m.conveyor)
        s += m.conveyor->stats();
    return s;
  }
  std::uint64_t sends() const noexcept { return sends_; }
  std::uint64_t handler_invocations() const noexcept { return handled_; }

private:
  using Packet = typename Mailbox::Packet;

  void close(std::size_t mbx) {
    Mailbox &m = mailboxes_[mbx];
    if (m.closed)
      return;
    m.closed = true;
    wait_for_ring_space(mbx);
    m.ring.push_back(Packet{T{}, ctx_.rank(), true});
  }

  void wait_for_ring_space(std::size_t mbx) {
    Mailbox &m = mailboxes_[mbx];
    while (m.ring.full()) {
      if (!in_handler_) {
        tasking::yield_now();
        continue;
      }
      // Yielding here would let another mailbox's handler run in the middle
      // of this one. Drive the target mailbox's conveyor directly instead.
      if (!drain_ring(m)) {
        m.conveyor->advance(false);
        if (!drain_ring(m)) {
          ctx_.check_abort();
          std::this_thread::yield();
        }
      }
    }
  }

  /// Pushes ring packets into the conveyor until a push fails or the done
  /// marker is consumed. Returns whether anything left the ring.
  bool drain_ring(Mailbox &m, bool *done_seen = nullptr) {
    std::size_t i = 0;
    for (; i < m.ring.size(); ++i) {
      const Packet &pkt = m.ring[i];
      if (pkt.done_marker) {
        if (!done_seen)
          break;
        *done_seen = true;
        ++i;
        break;
      }
      if (!m.conveyor->push(pkt.dest, pkt.payload))
        break;
    }
    m.ring.erase_begin(i);
    return i > 0;
  }

  void invoke(std::size_t mbx, const T &payload, PeId from) {
    if (in_handler_)
      throw std::logic_error("selector handlers overlapped on one PE");
    in_handler_ = true;
    try {
      mailboxes_[mbx].process(payload, from);
    } catch (const std::exception &e) {
      in_handler_ = false;
      std::ostringstream os;
      os << "PE " << ctx_.rank().rank << ": handler of mailbox " << mbx << " failed on a message from PE "
         << from.rank << ": " << e.what();
      throw std::runtime_error(os.str());
    }
    in_handler_ = false;
    ++handled_;
  }

  void worker_loop(std::size_t mbx) {
    Mailbox &m = mailboxes_[mbx];
    while (m.ring.empty())
      tasking::yield_now();
    bool done_seen = m.ring.front().done_marker;
    while (m.conveyor->advance(done_seen)) {
      drain_ring(m, &done_seen);
      while (auto item = m.conveyor->template pull_as<T>())
        invoke(mbx, item->first, item->second);
      tasking::yield_now();
    }
    m.completion.put(true);
    on_mailbox_complete(mbx);
  }

  void on_mailbox_complete(std::size_t mbx) {
    for (int succ : graph_.successors(static_cast<int>(mbx))) {
      auto s = static_cast<std::size_t>(succ);
      if (--mailboxes_[s].open_edges == 0)
        close(s);
    }
    if (++completed_ == mailboxes_.size())
      all_done_.put(true);
  }

  PeContext &ctx_;
  TerminationGraph graph_;
  SelectorOptions options_;
  std::vector<Mailbox> mailboxes_;
  tasking::Promise<bool> all_done_;
  bool started_ = false;
  bool in_handler_ = false;
  std::size_t completed_ = 0;
  std::uint64_t sends_ = 0;
  std::uint64_t handled_ = 0;
};

/// An actor is a selector with a single mailbox.
template <class T> class Actor : public Selector<T> {
public:
  explicit Actor(PeContext &ctx, SelectorOptions options = {}) : Selector<T>(ctx, 1, options) {}

  using Selector<T>::send;
  using Selector<T>::done;

  void send(PeId dest, const T &msg) { Selector<T>::send(0, dest, msg); }
  void done() { Selector<T>::done(0); }
};

} // namespace fabsp

#endif
