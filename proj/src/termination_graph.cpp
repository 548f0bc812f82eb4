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

#include "fabsp/termination_graph.hpp"

#include <algorithm>
#include <string>

#include "fabsp/error.hpp"

namespace fabsp {

TerminationGraph::TerminationGraph(std::size_t mailboxes)
    : successors_(mailboxes), predecessors_(mailboxes) {
  if (mailboxes == 0)
    throw UsageError("a selector needs at least one mailbox");
}

TerminationGraph TerminationGraph::linear(std::size_t mailboxes) {
  TerminationGraph g(mailboxes);
  g.add_edge(kOutside, 0);
  for (std::size_t i = 1; i < mailboxes; ++i)
    g.add_edge(static_cast<int>(i - 1), static_cast<int>(i));
  return g;
}

void TerminationGraph::check_mailbox(int mailbox) const {
  if (mailbox < 0 || static_cast<std::size_t>(mailbox) >= successors_.size())
    throw UsageError("mailbox id " + std::to_string(mailbox) + " out of range");
}

TerminationGraph &TerminationGraph::add_edge(int from, int to) {
  if (to == kOutside)
    throw UsageError("the Outside node cannot have incoming edges");
  check_mailbox(to);
  if (from != kOutside)
    check_mailbox(from);
  auto &preds = predecessors_[static_cast<std::size_t>(to)];
  if (std::find(preds.begin(), preds.end(), from) != preds.end())
    return *this;
  preds.push_back(from);
  if (from != kOutside)
    successors_[static_cast<std::size_t>(from)].push_back(to);
  return *this;
}

const std::vector<int> &TerminationGraph::successors(int mailbox) const {
  check_mailbox(mailbox);
  return successors_[static_cast<std::size_t>(mailbox)];
}

const std::vector<int> &TerminationGraph::predecessors(int mailbox) const {
  check_mailbox(mailbox);
  return predecessors_[static_cast<std::size_t>(mailbox)];
}

bool TerminationGraph::fed_from_outside(int mailbox) const {
  const auto &p = predecessors(mailbox);
  return std::find(p.begin(), p.end(), kOutside) != p.end();
}

void TerminationGraph::validate() const {
  // Kahn's algorithm over mailbox-to-mailbox edges.
  const std::size_t n = size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (int p : predecessors_[v])
      if (p != kOutside)
        ++indegree[v];
  std::vector<int> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0)
      ready.push_back(static_cast<int>(v));
  std::size_t visited = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++visited;
    for (int s : successors_[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(s)] == 0)
        ready.push_back(s);
  }
  if (visited != n)
    throw UsageError("termination graph has a cycle");
}

} // namespace fabsp
