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

#ifndef FABSP_APPS_SPARSE_MATRIX_HPP
#define FABSP_APPS_SPARSE_MATRIX_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "fabsp/fabric.hpp"

namespace fabsp::apps {

/// A nonzero in global coordinates.
struct Entry {
  std::int64_t row;
  std::int64_t col;
  friend auto operator<=>(const Entry &, const Entry &) = default;
};

/// Serial compressed-row pattern matrix. Used for gathered copies and by the
/// oracles.
class SerialMatrix {
public:
  SerialMatrix() = default;
  SerialMatrix(std::int64_t nrows, std::int64_t ncols, std::vector<std::int64_t> offsets,
               std::vector<std::int64_t> cols);

  /// Duplicate entries are rejected.
  static SerialMatrix from_entries(std::int64_t nrows, std::int64_t ncols, std::vector<Entry> entries);

  std::int64_t nrows() const noexcept { return nrows_; }
  std::int64_t ncols() const noexcept { return ncols_; }
  std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(cols_.size()); }
  std::span<const std::int64_t> row(std::int64_t r) const;
  bool contains(std::int64_t r, std::int64_t c) const;
  std::vector<Entry> entries() const;

  friend bool operator==(const SerialMatrix &, const SerialMatrix &) = default;

private:
  std::int64_t nrows_ = 0;
  std::int64_t ncols_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int64_t> cols_;
};

/// This PE's rows of a row-cyclic distributed pattern matrix: local row l is
/// global row layout.global_of(me, l). Columns strictly increase within a row.
class SparseMatrixPartition {
public:
  SparseMatrixPartition(std::int64_t nrows, std::int64_t ncols, PartitionedLayout layout, PeId me);

  /// Sorts every row. Throws UsageError on out-of-range or duplicate columns
  /// or on a row count that does not match the layout.
  static SparseMatrixPartition from_rows(std::int64_t nrows, std::int64_t ncols, PartitionedLayout layout, PeId me,
                                         std::vector<std::vector<std::int64_t>> rows);

  std::int64_t nrows_global() const noexcept { return nrows_; }
  std::int64_t ncols_global() const noexcept { return ncols_; }
  std::int64_t local_rows() const noexcept { return static_cast<std::int64_t>(offsets_.size()) - 1; }
  std::int64_t nnz_local() const noexcept { return static_cast<std::int64_t>(cols_.size()); }
  std::int64_t global_row(std::int64_t local) const noexcept { return layout_.global_of(me_, local); }
  std::span<const std::int64_t> row(std::int64_t local) const;
  const PartitionedLayout &layout() const noexcept { return layout_; }
  PeId me() const noexcept { return me_; }

  std::vector<Entry> entries() const;

  friend bool operator==(const SparseMatrixPartition &a, const SparseMatrixPartition &b) {
    return a.nrows_ == b.nrows_ && a.ncols_ == b.ncols_ && a.me_ == b.me_ && a.offsets_ == b.offsets_ &&
           a.cols_ == b.cols_;
  }

private:
  std::int64_t nrows_;
  std::int64_t ncols_;
  PartitionedLayout layout_;
  PeId me_;
  std::vector<std::int64_t> offsets_;
  std::vector<std::int64_t> cols_;
};

/// Largest matrix the gathered-oracle mode will assemble on one PE.
inline constexpr std::int64_t kMaxGatheredEntries = 10'000'000;

/// Collective. The root receives the whole matrix; other PEs an empty one.
/// Throws UsageError above kMaxGatheredEntries.
SerialMatrix gather_matrix(PeContext &ctx, const SparseMatrixPartition &a, PeId root = PeId(0));

/// Collective: the given global-index values of every PE, assembled on the
/// root into one vector indexed by global index (cyclic layout).
std::vector<std::int64_t> gather_cyclic(PeContext &ctx, std::span<const std::int64_t> local, std::int64_t global_size,
                                        PeId root = PeId(0));

} // namespace fabsp::apps

#endif
