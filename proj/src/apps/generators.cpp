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

#include "fabsp/apps/generators.hpp"

#include <algorithm>
#include <numeric>

namespace fabsp::apps {

namespace {

// Stream ids for the different generators, so that e.g. matrix rows and
// permutation draws sharing a seed stay independent.
constexpr std::uint64_t kIndexStream = 0x1000'0000'0000ULL;
constexpr std::uint64_t kPermStream = 0x2000'0000'0000ULL;
constexpr std::uint64_t kRowStream = 0x3000'0000'0000ULL;

double off_diagonal_probability(std::int64_t n, double z) {
  // Row i of a triangle has on average n/2 candidate columns.
  if (n <= 1)
    return 0.0;
  return std::min(1.0, 2.0 * z / static_cast<double>(n));
}

template <class RowFn>
SparseMatrixPartition build_partition(std::int64_t n, PartitionedLayout layout, PeId me, RowFn row_fn) {
  const std::int64_t local = layout.local_size(me, n);
  std::vector<std::vector<std::int64_t>> rows(static_cast<std::size_t>(local));
  for (std::int64_t l = 0; l < local; ++l)
    rows[static_cast<std::size_t>(l)] = row_fn(layout.global_of(me, l));
  return SparseMatrixPartition::from_rows(n, n, layout, me, std::move(rows));
}

template <class RowFn> SerialMatrix build_serial(std::int64_t n, RowFn row_fn) {
  std::vector<std::int64_t> offsets{0}, cols;
  for (std::int64_t r = 0; r < n; ++r) {
    auto row = row_fn(r);
    cols.insert(cols.end(), row.begin(), row.end());
    offsets.push_back(static_cast<std::int64_t>(cols.size()));
  }
  return SerialMatrix(n, n, std::move(offsets), std::move(cols));
}

} // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e37'79b9'7f4a'7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58'476d'1ce4'e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d0'49bb'1331'11ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept { return mix64(mix64(seed) ^ stream); }

std::vector<std::int64_t> gen_indices(std::uint64_t seed, int rank, std::int64_t count, std::int64_t range) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  if (out.empty())
    return out;
  if (range <= 0)
    throw UsageError("index range must be positive");
  Rng rng(stream_seed(seed, kIndexStream + static_cast<std::uint64_t>(rank)));
  std::uniform_int_distribution<std::int64_t> pick(0, range - 1);
  for (auto &x : out)
    x = pick(rng);
  return out;
}

std::vector<std::int64_t> bernoulli_row(std::uint64_t seed, std::int64_t row, std::int64_t begin, std::int64_t end,
                                        double p) {
  std::vector<std::int64_t> cols;
  if (begin >= end || p <= 0.0)
    return cols;
  if (p >= 1.0) {
    cols.resize(static_cast<std::size_t>(end - begin));
    std::iota(cols.begin(), cols.end(), begin);
    return cols;
  }
  Rng rng(stream_seed(seed, kRowStream + static_cast<std::uint64_t>(row)));
  // Gaps between successive successes are geometric.
  std::geometric_distribution<std::int64_t> gap(p);
  for (std::int64_t c = begin + gap(rng); c < end; c += 1 + gap(rng))
    cols.push_back(c);
  return cols;
}

SparseMatrixPartition gen_er_matrix(std::uint64_t seed, std::int64_t n, double z, PartitionedLayout layout, PeId me) {
  const double p = n > 0 ? std::min(1.0, z / static_cast<double>(n)) : 0.0;
  return build_partition(n, layout, me, [&](std::int64_t r) { return bernoulli_row(seed, r, 0, n, p); });
}

SerialMatrix gen_er_matrix_serial(std::uint64_t seed, std::int64_t n, double z) {
  const double p = n > 0 ? std::min(1.0, z / static_cast<double>(n)) : 0.0;
  return build_serial(n, [&](std::int64_t r) { return bernoulli_row(seed, r, 0, n, p); });
}

SparseMatrixPartition gen_lower_graph(std::uint64_t seed, std::int64_t n, double z, PartitionedLayout layout,
                                      PeId me) {
  const double p = off_diagonal_probability(n, z);
  return build_partition(n, layout, me, [&](std::int64_t r) { return bernoulli_row(seed, r, 0, r, p); });
}

SerialMatrix gen_lower_graph_serial(std::uint64_t seed, std::int64_t n, double z) {
  const double p = off_diagonal_probability(n, z);
  return build_serial(n, [&](std::int64_t r) { return bernoulli_row(seed, r, 0, r, p); });
}

std::vector<std::int64_t> gen_permutation(std::uint64_t seed, std::int64_t n) {
  std::vector<std::int64_t> perm(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(stream_seed(seed, kPermStream));
  for (std::int64_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::int64_t> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }
  return perm;
}

ScrambledTriangular gen_scramble(std::uint64_t seed, std::int64_t n) {
  return {gen_permutation(stream_seed(seed, 1), n), gen_permutation(stream_seed(seed, 2), n)};
}

namespace {
std::vector<std::int64_t> upper_row(std::uint64_t seed, std::int64_t n, double p, std::int64_t i) {
  auto cols = bernoulli_row(seed, i, i + 1, n, p);
  cols.insert(cols.begin(), i);
  return cols;
}
} // namespace

SparseMatrixPartition gen_scrambled_triangular(std::uint64_t seed, std::int64_t n, double z,
                                               const ScrambledTriangular &scramble, PartitionedLayout layout,
                                               PeId me) {
  const double p = off_diagonal_probability(n, z);
  std::vector<std::int64_t> inverse_rows(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    inverse_rows[static_cast<std::size_t>(scramble.row_perm[static_cast<std::size_t>(i)])] = i;
  return build_partition(n, layout, me, [&](std::int64_t r) {
    auto cols = upper_row(seed, n, p, inverse_rows[static_cast<std::size_t>(r)]);
    for (auto &c : cols)
      c = scramble.col_perm[static_cast<std::size_t>(c)];
    return cols;
  });
}

SerialMatrix gen_upper_triangular_serial(std::uint64_t seed, std::int64_t n, double z) {
  const double p = off_diagonal_probability(n, z);
  return build_serial(n, [&](std::int64_t i) { return upper_row(seed, n, p, i); });
}

} // namespace fabsp::apps
