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

#ifndef FABSP_APPS_ORACLES_HPP
#define FABSP_APPS_ORACLES_HPP

// Serial reference computations used to validate the distributed kernels.
// None of them go through the selector runtime.

#include <cstdint>
#include <span>
#include <vector>

#include "fabsp/apps/sparse_matrix.hpp"

namespace fabsp::apps {

/// Replays every PE's index stream and counts.
std::vector<std::int64_t> histogram_oracle(std::uint64_t seed, int npes, std::int64_t updates_per_pe,
                                           std::int64_t table_size);

SerialMatrix transpose_oracle(const SerialMatrix &a);
SerialMatrix permute_oracle(const SerialMatrix &a, std::span<const std::int64_t> row_perm,
                            std::span<const std::int64_t> col_perm);

bool is_permutation_of_range(std::span<const std::int64_t> values);

/// The single-PE dart-throwing schedule, replayed without the runtime.
struct RandomPermutationReplay {
  std::vector<std::int64_t> permutation;
  std::int64_t rounds = 0;
};
RandomPermutationReplay random_permutation_single_pe(std::uint64_t seed, std::int64_t m);

/// True iff both position vectors are permutations and moving every entry
/// (r, c) of m to (row_pos[r], col_pos[c]) gives an upper-triangular pattern
/// with a full diagonal.
bool is_unit_upper_triangular_under(const SerialMatrix &m, std::span<const std::int64_t> row_pos,
                                    std::span<const std::int64_t> col_pos);

/// Serial wavefront peeling with the same tie-breaking as the distributed
/// kernel on one PE.
struct ToposortReplay {
  std::vector<std::int64_t> row_position;
  std::vector<std::int64_t> col_position;
  std::int64_t rounds = 0;
  bool ok = false;
};
ToposortReplay toposort_single_pe(const SerialMatrix &m);

/// Dense brute force over vertex triples i > j > k.
std::int64_t triangles_brute_force(const SerialMatrix &lower);

} // namespace fabsp::apps

#endif
