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

#ifndef FABSP_APPS_KERNELS_HPP
#define FABSP_APPS_KERNELS_HPP

// Distributed mini-application kernels. Each is collective: every PE of the
// fabric calls it with its own partition of the input.

#include <cstdint>
#include <span>
#include <vector>

#include "fabsp/apps/generators.hpp"
#include "fabsp/apps/sparse_matrix.hpp"
#include "fabsp/selector.hpp"

namespace fabsp::apps {

/// Histogram: every global index drawn anywhere bumps its bucket by one.
/// Returns this PE's buckets (cyclic, table_per_pe of them).
std::vector<std::int64_t> histogram_kernel(PeContext &ctx, std::span<const std::int64_t> global_indices,
                                           std::int64_t table_per_pe, const SelectorOptions &opts);

/// Fill rule of the index-gather source table.
constexpr std::int64_t index_gather_fill(std::int64_t g) noexcept { return 2 * g + 1; }

/// Index-gather: result[i] = table[indices[i]] for a cyclic distributed table
/// whose local part is local_table.
std::vector<std::int64_t> index_gather_kernel(PeContext &ctx, std::span<const std::int64_t> indices,
                                              std::span<const std::int64_t> local_table, const SelectorOptions &opts);

SparseMatrixPartition transpose_kernel(PeContext &ctx, const SparseMatrixPartition &a, const SelectorOptions &opts);

/// Entry (r, c) moves to (row_perm[r], col_perm[c]). Both permutations are
/// full length on every PE.
SparseMatrixPartition permute_kernel(PeContext &ctx, const SparseMatrixPartition &a,
                                     std::span<const std::int64_t> row_perm, std::span<const std::int64_t> col_perm,
                                     const SelectorOptions &opts);

struct RandomPermutationResult {
  /// This PE's consecutive block of the permutation; the global permutation
  /// is the concatenation of the blocks in rank order.
  std::vector<std::int64_t> block;
  std::int64_t rounds = 0;
  bool hit_round_cap = false;
};

/// Slots per dart in the target array.
inline constexpr std::int64_t kDartTargetFactor = 2;
std::int64_t dart_round_cap(std::int64_t m) noexcept;
Rng dart_stream(std::uint64_t seed, int rank);

/// Dart throwing over a cyclic target array of kDartTargetFactor * m slots,
/// m = npes * elements_per_pe. One fresh Request/Response selector per round.
RandomPermutationResult random_permutation_kernel(PeContext &ctx, std::int64_t elements_per_pe, std::uint64_t seed,
                                                  const SelectorOptions &opts);

struct ToposortResult {
  std::vector<std::int64_t> row_position; // per local row
  std::vector<std::int64_t> col_position; // per locally owned column (cyclic)
  std::int64_t rounds = 0;
  bool stalled = false;  // a round found no row with a single live nonzero
  bool conflict = false; // two rows claimed the same column
};

/// Finds row and column positions that turn a permuted unit upper-triangular
/// matrix back into upper-triangular form.
ToposortResult toposort_kernel(PeContext &ctx, const SparseMatrixPartition &scrambled, const SelectorOptions &opts);

/// Global number of triangles of the graph whose strictly lower-triangular
/// adjacency is given.
std::int64_t triangle_kernel(PeContext &ctx, const SparseMatrixPartition &lower, const SelectorOptions &opts);

} // namespace fabsp::apps

#endif
