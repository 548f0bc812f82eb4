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

#ifndef FABSP_TERMINATION_GRAPH_HPP
#define FABSP_TERMINATION_GRAPH_HPP

#include <cstddef>
#include <vector>

namespace fabsp {

/// Dependency DAG over the mailboxes of one selector. An edge X -> Y states
/// that the handler of X may send to Y. kOutside stands for every sender that
/// is not a handler of this selector (the PE's own code, other selectors).
class TerminationGraph {
public:
  static constexpr int kOutside = -1;

  explicit TerminationGraph(std::size_t mailboxes);

  /// Outside -> 0 -> 1 -> ... -> n-1.
  static TerminationGraph linear(std::size_t mailboxes);

  /// Duplicate edges are ignored. Throws UsageError for out-of-range ids and
  /// for edges into Outside.
  TerminationGraph &add_edge(int from, int to);

  std::size_t size() const noexcept { return successors_.size(); }
  const std::vector<int> &successors(int mailbox) const;
  const std::vector<int> &predecessors(int mailbox) const;
  bool fed_from_outside(int mailbox) const;

  /// Throws UsageError if the mailbox edges contain a cycle.
  void validate() const;

private:
  void check_mailbox(int mailbox) const;

  std::vector<std::vector<int>> successors_;
  std::vector<std::vector<int>> predecessors_; // may contain kOutside
};

} // namespace fabsp

#endif
