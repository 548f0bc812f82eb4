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

#include <functional>
#include <vector>

#include "fabsp/tasking.hpp"

using namespace fabsp;
using namespace fabsp::tasking;

namespace {

// Runs the same task tree bodies as plain nested calls; the number of bodies
// executed is the number of tasks a correct finish must wait for.
int count_tasks_sequentially(int fanout, int depth) {
  int n = 1;
  if (depth > 0)
    for (int i = 0; i < fanout; ++i)
      n += count_tasks_sequentially(fanout, depth - 1);
  return n;
}

void spawn_tree(int fanout, int depth, int &completed) {
  if (depth > 0)
    for (int i = 0; i < fanout; ++i)
      spawn([fanout, depth, &completed] { spawn_tree(fanout, depth - 1, completed); });
  yield_now();
  ++completed;
}

} // namespace

TEST_CASE("finish waits for a single task") {
  Scheduler sched;
  bool flag = false;
  finish([&] { spawn([&] { flag = true; }); });
  CHECK(flag);
}

TEST_CASE("finish over an empty scope returns immediately") {
  Scheduler sched;
  finish([] {});
  CHECK(sched.stats().spawned == 0);
  CHECK(sched.stats().resumes == 0);
}

TEST_CASE("nested spawns are covered by the enclosing finish") {
  Scheduler sched;
  const int expected = count_tasks_sequentially(10, 1);
  REQUIRE(expected == 11);
  int completed = 0;
  finish([&] { spawn([&] { spawn_tree(10, 1, completed); }); });
  CHECK(completed == expected);
  CHECK(sched.stats().completed == static_cast<std::uint64_t>(expected));

  // Deeper tree, same oracle.
  completed = 0;
  finish([&] { spawn([&] { spawn_tree(3, 4, completed); }); });
  CHECK(completed == count_tasks_sequentially(3, 4));
}

TEST_CASE("finish soundness: spawn counter equals completion counter") {
  Scheduler sched;
  int spawned = 0, done = 0;
  std::function<void(int)> body = [&](int d) {
    for (int i = 0; i < d; ++i) {
      ++spawned;
      spawn([&, d] {
        body(d - 1);
        ++done;
      });
      yield_now();
    }
  };
  finish([&] { body(5); });
  CHECK(done == spawned);
  CHECK(spawned > 0);
}

TEST_CASE("two tasks alternately yielding both complete") {
  Scheduler sched;
  std::vector<int> trace;
  finish([&] {
    for (int id = 0; id < 2; ++id)
      spawn([&, id] {
        for (int i = 0; i < 5; ++i) {
          trace.push_back(id);
          yield_now();
        }
      });
  });
  REQUIRE(trace.size() == 10);
  // FIFO scheduling interleaves strictly.
  for (std::size_t i = 0; i < trace.size(); ++i)
    CHECK(trace[i] == static_cast<int>(i % 2));
}

TEST_CASE("100 tasks yielding 100 times each resume 10,000 times") {
  Scheduler sched;
  int resumed_after_yield = 0;
  finish([&] {
    for (int t = 0; t < 100; ++t)
      spawn([&] {
        for (int i = 0; i < 100; ++i) {
          yield_now();
          ++resumed_after_yield;
        }
      });
  });
  CHECK(resumed_after_yield == 10000);
  // Each task is also resumed once to start it.
  CHECK(sched.stats().resumes == 10000 + 100);
}

TEST_CASE("promise put then wait returns the value") {
  Scheduler sched;
  Promise<int> p;
  p.put(42);
  CHECK(p.get_future().wait() == 42);
}

TEST_CASE("future wait in one task, put in another") {
  Scheduler sched;
  Promise<int> p;
  int seen = 0;
  bool waiter_started = false;
  finish([&] {
    spawn([&] {
      waiter_started = true;
      seen = p.get_future().wait();
    });
    spawn([&] {
      while (!waiter_started)
        yield_now();
      for (int i = 0; i < 3; ++i)
        yield_now();
      CHECK(seen == 0);
      p.put(7);
    });
  });
  CHECK(seen == 7);
}

TEST_CASE("waiting on a future from the root drives tasks") {
  Scheduler sched;
  Promise<std::string> p;
  spawn([&] {
    yield_now();
    p.put("ready");
  });
  CHECK(p.get_future().wait() == "ready");
  finish([] {});
}

TEST_CASE("double put is a single-assignment violation") {
  Scheduler sched;
  Promise<int> p;
  p.put(1);
  CHECK_THROWS_AS(p.put(2), SingleAssignmentError);
  CHECK(p.get_future().wait() == 1);
}

TEST_CASE("spawning into a closed scope is rejected") {
  Scheduler sched;
  FinishScope scope(sched);
  sched.spawn(scope, [] {});
  scope.wait();
  CHECK(scope.closed());
  CHECK_THROWS_AS(sched.spawn(scope, [] {}), UsageError);
}

TEST_CASE("an exception escaping a task reaches the waiter") {
  Scheduler sched;
  CHECK_THROWS_WITH(finish([] { spawn([] { throw std::runtime_error("boom"); }); }), "boom");
}

TEST_CASE("task handle reports completion") {
  Scheduler sched;
  TaskHandle h;
  finish([&] {
    h = spawn([] { yield_now(); });
    CHECK_FALSE(h.finished());
  });
  CHECK(h.finished());
}

TEST_CASE("finish inside a task waits for its own children only") {
  Scheduler sched;
  int inner = 0;
  bool outer_sibling_done = false;
  finish([&] {
    spawn([&] {
      for (int i = 0; i < 10; ++i)
        yield_now();
      outer_sibling_done = true;
    });
    spawn([&] {
      finish([&] {
        for (int i = 0; i < 4; ++i)
          spawn([&] { ++inner; });
      });
      CHECK(inner == 4);
      CHECK_FALSE(outer_sibling_done);
    });
  });
  CHECK(outer_sibling_done);
}
