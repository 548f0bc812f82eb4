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

#include "fabsp/tasking.hpp"

#include <thread>

#include <boost/context/fiber.hpp>
#include <boost/context/fixedsize_stack.hpp>

namespace fabsp::tasking {

namespace ctx = boost::context;

namespace detail {

struct Task {
  std::function<void()> body;
  FinishScope *scope = nullptr;
  FinishScope *current_scope = nullptr;
  ctx::fiber fiber;
  ctx::fiber caller; // the suspended root while this task runs
  std::exception_ptr error;
  std::shared_ptr<bool> finished = std::make_shared<bool>(false);
  bool returned = false;
};

} // namespace detail

namespace {
thread_local Scheduler *tls_scheduler = nullptr;

Scheduler &require_scheduler() {
  Scheduler *s = Scheduler::current();
  if (!s)
    throw UsageError("no task scheduler installed on this thread");
  return *s;
}
} // namespace

FinishScope::~FinishScope() = default;

void FinishScope::wait() {
  while (pending_ > 0)
    sched_->yield();
  closed_ = true;
}

Scheduler::Scheduler(std::size_t stack_size)
    : stack_size_(stack_size), root_scope_(std::make_unique<FinishScope>(*this)),
      root_current_scope_(root_scope_.get()), previous_(tls_scheduler) {
  tls_scheduler = this;
}

Scheduler::~Scheduler() {
  // Suspended fibers are unwound by their destructors.
  ready_.clear();
  tls_scheduler = previous_;
}

void Scheduler::abandon() noexcept {
  for (auto &t : ready_)
    (void)t.release();
  ready_.clear();
}

Scheduler *Scheduler::current() noexcept { return tls_scheduler; }

FinishScope &Scheduler::current_scope() noexcept {
  return current_task_ ? *current_task_->current_scope : *root_current_scope_;
}

FinishScope *Scheduler::exchange_current_scope(FinishScope *scope) noexcept {
  FinishScope *&slot = current_task_ ? current_task_->current_scope : root_current_scope_;
  return std::exchange(slot, scope);
}

TaskHandle Scheduler::spawn(FinishScope &scope, std::function<void()> body) {
  if (scope.closed_)
    throw UsageError("spawn into a closed finish scope");
  auto task = std::make_unique<detail::Task>();
  detail::Task *t = task.get();
  t->body = std::move(body);
  t->scope = &scope;
  t->current_scope = &scope;
  t->fiber = ctx::fiber(std::allocator_arg, ctx::fixedsize_stack(stack_size_),
                        [t](ctx::fiber &&caller) {
                          t->caller = std::move(caller);
                          try {
                            t->body();
                          } catch (const ctx::detail::forced_unwind &) {
                            throw;
                          } catch (...) {
                            t->error = std::current_exception();
                          }
                          t->returned = true;
                          return std::move(t->caller);
                        });
  ++scope.pending_;
  ++stats_.spawned;
  TaskHandle handle(t->finished);
  ready_.push_back(std::move(task));
  return handle;
}

std::size_t Scheduler::run_pass() {
  if (current_task_)
    throw UsageError("run_pass called from inside a task");
  ++stats_.passes;
  std::size_t n = ready_.size();
  for (std::size_t i = 0; i < n && !ready_.empty(); ++i) {
    std::unique_ptr<detail::Task> task = std::move(ready_.front());
    ready_.pop_front();
    current_task_ = task.get();
    ++stats_.resumes;
    task->fiber = std::move(task->fiber).resume();
    current_task_ = nullptr;
    if (!task->returned) {
      ready_.push_back(std::move(task));
      continue;
    }
    *task->finished = true;
    --task->scope->pending_;
    ++stats_.completed;
    if (task->error)
      std::rethrow_exception(task->error);
  }
  return n;
}

void Scheduler::yield() {
  if (current_task_) {
    detail::Task *t = current_task_;
    t->caller = std::move(t->caller).resume();
    return;
  }
  if (poll_hook_)
    poll_hook_();
  run_pass();
  std::this_thread::yield();
}

TaskHandle spawn(std::function<void()> body) {
  Scheduler &s = require_scheduler();
  return s.spawn(s.current_scope(), std::move(body));
}

void yield_now() { require_scheduler().yield(); }

void finish(const std::function<void()> &body) {
  Scheduler &s = require_scheduler();
  FinishScope scope(s);
  FinishScope *outer = s.exchange_current_scope(&scope);
  std::exception_ptr error;
  try {
    body();
  } catch (const ctx::detail::forced_unwind &) {
    throw;
  } catch (...) {
    error = std::current_exception();
  }
  s.exchange_current_scope(outer);
  scope.wait();
  if (error)
    std::rethrow_exception(error);
}

} // namespace fabsp::tasking
