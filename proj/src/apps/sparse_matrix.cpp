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

#include "fabsp/apps/sparse_matrix.hpp"

#include <algorithm>
#include <string>

namespace fabsp::apps {

SerialMatrix::SerialMatrix(std::int64_t nrows, std::int64_t ncols, std::vector<std::int64_t> offsets,
                           std::vector<std::int64_t> cols)
    : nrows_(nrows), ncols_(ncols), offsets_(std::move(offsets)), cols_(std::move(cols)) {
  if (static_cast<std::int64_t>(offsets_.size()) != nrows_ + 1 || offsets_.back() != nnz())
    throw UsageError("malformed compressed-row offsets");
}

SerialMatrix SerialMatrix::from_entries(std::int64_t nrows, std::int64_t ncols, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  if (std::adjacent_find(entries.begin(), entries.end()) != entries.end())
    throw UsageError("duplicate matrix entry");
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(nrows) + 1, 0);
  std::vector<std::int64_t> cols;
  cols.reserve(entries.size());
  for (const Entry &e : entries) {
    if (e.row < 0 || e.row >= nrows || e.col < 0 || e.col >= ncols)
      throw UsageError("matrix entry out of range");
    ++offsets[static_cast<std::size_t>(e.row) + 1];
    cols.push_back(e.col);
  }
  for (std::size_t r = 1; r < offsets.size(); ++r)
    offsets[r] += offsets[r - 1];
  return SerialMatrix(nrows, ncols, std::move(offsets), std::move(cols));
}

std::span<const std::int64_t> SerialMatrix::row(std::int64_t r) const {
  const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(r)]);
  const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(r) + 1]);
  return std::span<const std::int64_t>(cols_).subspan(b, e - b);
}

bool SerialMatrix::contains(std::int64_t r, std::int64_t c) const {
  auto cols = row(r);
  return std::binary_search(cols.begin(), cols.end(), c);
}

std::vector<Entry> SerialMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(cols_.size());
  for (std::int64_t r = 0; r < nrows_; ++r)
    for (std::int64_t c : row(r))
      out.push_back({r, c});
  return out;
}

SparseMatrixPartition::SparseMatrixPartition(std::int64_t nrows, std::int64_t ncols, PartitionedLayout layout,
                                             PeId me)
    : nrows_(nrows), ncols_(ncols), layout_(layout), me_(me),
      offsets_(static_cast<std::size_t>(layout.local_size(me, nrows)) + 1, 0) {}

SparseMatrixPartition SparseMatrixPartition::from_rows(std::int64_t nrows, std::int64_t ncols,
                                                       PartitionedLayout layout, PeId me,
                                                       std::vector<std::vector<std::int64_t>> rows) {
  SparseMatrixPartition m(nrows, ncols, layout, me);
  if (static_cast<std::int64_t>(rows.size()) != m.local_rows())
    throw UsageError("row count does not match the cyclic layout");
  std::size_t total = 0;
  for (const auto &r : rows)
    total += r.size();
  m.cols_.reserve(total);
  for (std::size_t l = 0; l < rows.size(); ++l) {
    auto &r = rows[l];
    std::sort(r.begin(), r.end());
    if (std::adjacent_find(r.begin(), r.end()) != r.end())
      throw UsageError("duplicate column in row " + std::to_string(m.global_row(static_cast<std::int64_t>(l))));
    if (!r.empty() && (r.front() < 0 || r.back() >= ncols))
      throw UsageError("column index out of range");
    m.cols_.insert(m.cols_.end(), r.begin(), r.end());
    m.offsets_[l + 1] = static_cast<std::int64_t>(m.cols_.size());
  }
  return m;
}

std::span<const std::int64_t> SparseMatrixPartition::row(std::int64_t local) const {
  const auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(local)]);
  const auto e = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(local) + 1]);
  return std::span<const std::int64_t>(cols_).subspan(b, e - b);
}

std::vector<Entry> SparseMatrixPartition::entries() const {
  std::vector<Entry> out;
  out.reserve(cols_.size());
  for (std::int64_t l = 0; l < local_rows(); ++l)
    for (std::int64_t c : row(l))
      out.push_back({global_row(l), c});
  return out;
}

SerialMatrix gather_matrix(PeContext &ctx, const SparseMatrixPartition &a, PeId root) {
  if (ctx.allreduce_sum(a.nnz_local()) > kMaxGatheredEntries)
    throw UsageError("matrix too large for gathered-oracle validation");
  const std::vector<Entry> mine = a.entries();
  auto parts = ctx.gather(std::span<const Entry>(mine), root);
  if (ctx.rank() != root)
    return SerialMatrix();
  std::vector<Entry> all;
  for (auto &p : parts)
    all.insert(all.end(), p.begin(), p.end());
  return SerialMatrix::from_entries(a.nrows_global(), a.ncols_global(), std::move(all));
}

std::vector<std::int64_t> gather_cyclic(PeContext &ctx, std::span<const std::int64_t> local, std::int64_t global_size,
                                        PeId root) {
  if (global_size > kMaxGatheredEntries)
    throw UsageError("array too large for gathered-oracle validation");
  auto parts = ctx.gather(local, root);
  if (ctx.rank() != root)
    return {};
  std::vector<std::int64_t> out(static_cast<std::size_t>(global_size), 0);
  for (int r = 0; r < ctx.npes(); ++r) {
    const auto &p = parts[static_cast<std::size_t>(r)];
    if (static_cast<std::int64_t>(p.size()) != ctx.layout().local_size(PeId(r), global_size))
      throw UsageError("gathered partition has the wrong length");
    for (std::size_t l = 0; l < p.size(); ++l)
      out[static_cast<std::size_t>(ctx.layout().global_of(PeId(r), static_cast<std::int64_t>(l)))] = p[l];
  }
  return out;
}

} // namespace fabsp::apps
