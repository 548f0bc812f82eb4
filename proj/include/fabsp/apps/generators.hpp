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

#ifndef FABSP_APPS_GENERATORS_HPP
#define FABSP_APPS_GENERATORS_HPP

// Deterministic input generators. Every random stream is keyed by (seed,
// stream id), where the stream id is a PE rank or a global row index, so the
// serial oracles can replay exactly what each PE drew.

#include <cstdint>
#include <random>
#include <vector>

#include "fabsp/apps/sparse_matrix.hpp"

namespace fabsp::apps {

std::uint64_t mix64(std::uint64_t x) noexcept;
/// Seed for an independent stream.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Order-independent digest helpers: checksums are sums of mixed tuples.
inline std::uint64_t digest(std::uint64_t a, std::uint64_t b) noexcept { return mix64(mix64(a) ^ (b + 0x9e37'79b9'7f4a'7c15ULL)); }

using Rng = std::mt19937_64;

/// Rank r's stream of `count` uniform indices in [0, range).
std::vector<std::int64_t> gen_indices(std::uint64_t seed, int rank, std::int64_t count, std::int64_t range);

/// Columns of [begin, end) each present independently with probability p,
/// drawn from the stream of the given row. Sorted.
std::vector<std::int64_t> bernoulli_row(std::uint64_t seed, std::int64_t row, std::int64_t begin, std::int64_t end,
                                        double p);

/// Erdos-Renyi n x n pattern with z expected nonzeros per row.
SparseMatrixPartition gen_er_matrix(std::uint64_t seed, std::int64_t n, double z, PartitionedLayout layout, PeId me);
SerialMatrix gen_er_matrix_serial(std::uint64_t seed, std::int64_t n, double z);

/// Strictly lower-triangular adjacency of an undirected Erdos-Renyi graph
/// (the symmetric matrix with its upper half dropped), z expected nonzeros per
/// row of the lower triangle.
SparseMatrixPartition gen_lower_graph(std::uint64_t seed, std::int64_t n, double z, PartitionedLayout layout, PeId me);
SerialMatrix gen_lower_graph_serial(std::uint64_t seed, std::int64_t n, double z);

/// Uniform permutation of [0, n) (Fisher-Yates on the seed's stream).
std::vector<std::int64_t> gen_permutation(std::uint64_t seed, std::int64_t n);

/// Upper-triangular pattern with unit diagonal and z expected off-diagonal
/// nonzeros per row, rows and columns scrambled: entry (i, j) of the
/// triangular matrix lands at (row_perm[i], col_perm[j]).
struct ScrambledTriangular {
  std::vector<std::int64_t> row_perm;
  std::vector<std::int64_t> col_perm;
};
ScrambledTriangular gen_scramble(std::uint64_t seed, std::int64_t n);
SparseMatrixPartition gen_scrambled_triangular(std::uint64_t seed, std::int64_t n, double z,
                                               const ScrambledTriangular &scramble, PartitionedLayout layout, PeId me);
SerialMatrix gen_upper_triangular_serial(std::uint64_t seed, std::int64_t n, double z);

} // namespace fabsp::apps

#endif
