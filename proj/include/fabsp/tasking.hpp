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

#ifndef FABSP_TASKING_HPP
#define FABSP_TASKING_HPP

// Cooperative task runtime for a single PE: async/finish task spawning and
// single-assignment promise/future synchronization. Tasks are stackful so that
// they may yield from arbitrarily deep call chains (e.g. a message handler
// whose nested send finds the outgoing ring full).
//
// Exactly one Scheduler is installed per OS thread. The thread's own stack is
// the "root" context: yield_now() from the root runs one pass over the FIFO
// run queue, while yield_now() from a task suspends it to the back of the
// queue and returns control to the root.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "fabsp/error.hpp"

namespace fabsp::tasking {

class Scheduler;

namespace detail {
struct Task;
} // namespace detail

/// Counts of transitively spawned, incomplete tasks. Once wait() returns the
/// scope is closed and further spawns are rejected.
class FinishScope {
public:
  explicit FinishScope(Scheduler &sched) : sched_(&sched) {}
  FinishScope(const FinishScope &) = delete;
  FinishScope &operator=(const FinishScope &) = delete;
  ~FinishScope();

  std::size_t pending() const noexcept { return pending_; }
  bool closed() const noexcept { return closed_; }

  /// Cooperatively waits until pending() == 0, then closes the scope.
  void wait();

private:
  friend class Scheduler;
  Scheduler *sched_;
  std::size_t pending_ = 0;
  bool closed_ = false;
};

class TaskHandle {
public:
  TaskHandle() = default;
  explicit TaskHandle(std::shared_ptr<const bool> finished)
      : finished_(std::move(finished)) {}
  bool finished() const noexcept { return finished_ && *finished_; }

private:
  std::shared_ptr<const bool> finished_;
};

struct SchedulerStats {
  std::uint64_t spawned = 0;
  std::uint64_t completed = 0;
  std::uint64_t resumes = 0; // every switch from the root into a task
  std::uint64_t passes = 0;
};

class Scheduler {
public:
  static constexpr std::size_t kDefaultStackSize = 256 * 1024;

  explicit Scheduler(std::size_t stack_size = kDefaultStackSize);
  Scheduler(const Scheduler &) = delete;
  Scheduler &operator=(const Scheduler &) = delete;
  ~Scheduler();

  /// The scheduler installed on the calling thread, or nullptr.
  static Scheduler *current() noexcept;

  TaskHandle spawn(FinishScope &scope, std::function<void()> body);

  /// See the file comment for root vs. task semantics.
  void yield();

  /// Root only: resume every task that was runnable at entry exactly once.
  /// Returns the number of tasks resumed. Rethrows the first exception
  /// escaping a task body.
  std::size_t run_pass();

  bool in_task() const noexcept { return current_task_ != nullptr; }
  std::size_t runnable() const noexcept { return ready_.size(); }
  const SchedulerStats &stats() const noexcept { return stats_; }

  /// Innermost finish scope of the running context (task or root).
  FinishScope &current_scope() noexcept;
  FinishScope *exchange_current_scope(FinishScope *scope) noexcept;

  /// Called from the root on every yield; may throw to unwind the PE (used by
  /// the fabric to propagate aborts).
  void set_poll_hook(std::function<void()> hook) { poll_hook_ = std::move(hook); }

  /// Drops suspended tasks without unwinding their stacks. Only for a PE that
  /// is being torn down after a failure, when the objects those stacks refer
  /// to may already be gone.
  void abandon() noexcept;

private:
  std::size_t stack_size_;
  std::deque<std::unique_ptr<detail::Task>> ready_;
  detail::Task *current_task_ = nullptr;
  std::unique_ptr<FinishScope> root_scope_;
  FinishScope *root_current_scope_ = nullptr;
  std::function<void()> poll_hook_;
  SchedulerStats stats_;
  Scheduler *previous_ = nullptr;
};

/// Spawns into the innermost finish scope of the calling context.
TaskHandle spawn(std::function<void()> body);
void yield_now();
/// Runs body, then waits for every task transitively spawned inside it.
void finish(const std::function<void()> &body);

namespace detail {
template <class T> struct SlotState {
  std::optional<T> value;
};
} // namespace detail

template <class T> class Future;

/// Single-assignment container. Copies share the same slot.
template <class T> class Promise {
public:
  Promise() : state_(std::make_shared<detail::SlotState<T>>()) {}

  void put(T value) {
    if (state_->value)
      throw SingleAssignmentError("promise already satisfied");
    state_->value.emplace(std::move(value));
  }

  bool filled() const noexcept { return state_->value.has_value(); }
  Future<T> get_future() const { return Future<T>(state_); }

private:
  std::shared_ptr<detail::SlotState<T>> state_;
};

template <class T> class Future {
public:
  Future() = default;

  bool valid() const noexcept { return state_ != nullptr; }
  bool ready() const noexcept { return state_ && state_->value.has_value(); }

  /// Yields cooperatively until the paired promise is put.
  const T &wait() const {
    if (!state_)
      throw UsageError("wait on an empty future");
    while (!state_->value)
      yield_now();
    return *state_->value;
  }

private:
  friend class Promise<T>;
  explicit Future(std::shared_ptr<detail::SlotState<T>> s) : state_(std::move(s)) {}
  std::shared_ptr<detail::SlotState<T>> state_;
};

} // namespace fabsp::tasking

#endif
