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

#include "fabsp/apps/oracles.hpp"

#include <algorithm>
#include <random>

#include "fabsp/apps/generators.hpp"
#include "fabsp/apps/kernels.hpp"

namespace fabsp::apps {

std::vector<std::int64_t> histogram_oracle(std::uint64_t seed, int npes, std::int64_t updates_per_pe,
                                           std::int64_t table_size) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(table_size), 0);
  for (int r = 0; r < npes; ++r)
    for (std::int64_t g : gen_indices(seed, r, updates_per_pe, table_size))
      ++counts[static_cast<std::size_t>(g)];
  return counts;
}

SerialMatrix transpose_oracle(const SerialMatrix &a) {
  // Counting sort by column.
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(a.ncols()) + 1, 0);
  for (std::int64_t r = 0; r < a.nrows(); ++r)
    for (std::int64_t c : a.row(r))
      ++offsets[static_cast<std::size_t>(c) + 1];
  for (std::size_t i = 1; i < offsets.size(); ++i)
    offsets[i] += offsets[i - 1];
  std::vector<std::int64_t> fill(offsets.begin(), offsets.end() - 1);
  std::vector<std::int64_t> cols(static_cast<std::size_t>(a.nnz()));
  for (std::int64_t r = 0; r < a.nrows(); ++r)
    for (std::int64_t c : a.row(r))
      cols[static_cast<std::size_t>(fill[static_cast<std::size_t>(c)]++)] = r;
  return SerialMatrix(a.ncols(), a.nrows(), std::move(offsets), std::move(cols));
}

SerialMatrix permute_oracle(const SerialMatrix &a, std::span<const std::int64_t> row_perm,
                            std::span<const std::int64_t> col_perm) {
  std::vector<Entry> moved;
  moved.reserve(static_cast<std::size_t>(a.nnz()));
  for (std::int64_t r = 0; r < a.nrows(); ++r)
    for (std::int64_t c : a.row(r))
      moved.push_back({row_perm[static_cast<std::size_t>(r)], col_perm[static_cast<std::size_t>(c)]});
  return SerialMatrix::from_entries(a.nrows(), a.ncols(), std::move(moved));
}

bool is_permutation_of_range(std::span<const std::int64_t> values) {
  std::vector<bool> seen(values.size(), false);
  for (std::int64_t v : values) {
    if (v < 0 || static_cast<std::size_t>(v) >= values.size() || seen[static_cast<std::size_t>(v)])
      return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

RandomPermutationReplay random_permutation_single_pe(std::uint64_t seed, std::int64_t m) {
  RandomPermutationReplay out;
  const std::int64_t slots = kDartTargetFactor * m;
  std::vector<std::int64_t> target(static_cast<std::size_t>(slots), -1);
  std::vector<std::int64_t> unplaced(static_cast<std::size_t>(m));
  for (std::int64_t d = 0; d < m; ++d)
    unplaced[static_cast<std::size_t>(d)] = d;
  if (m > 0) {
    Rng rng = dart_stream(seed, 0);
    std::uniform_int_distribution<std::int64_t> pick(0, slots - 1);
    while (!unplaced.empty()) {
      ++out.rounds;
      std::vector<std::pair<std::int64_t, std::int64_t>> claims;
      for (std::int64_t d : unplaced)
        claims.emplace_back(d, pick(rng));
      std::vector<std::int64_t> next;
      for (auto [d, slot] : claims) {
        auto &t = target[static_cast<std::size_t>(slot)];
        if (t == -1)
          t = d;
        else
          next.push_back(d);
      }
      unplaced = std::move(next);
    }
  }
  for (std::int64_t t : target)
    if (t != -1)
      out.permutation.push_back(t);
  return out;
}

bool is_unit_upper_triangular_under(const SerialMatrix &m, std::span<const std::int64_t> row_pos,
                                    std::span<const std::int64_t> col_pos) {
  if (m.nrows() != m.ncols() || static_cast<std::int64_t>(row_pos.size()) != m.nrows() ||
      static_cast<std::int64_t>(col_pos.size()) != m.ncols())
    return false;
  if (!is_permutation_of_range(row_pos) || !is_permutation_of_range(col_pos))
    return false;
  for (std::int64_t r = 0; r < m.nrows(); ++r) {
    const std::int64_t rp = row_pos[static_cast<std::size_t>(r)];
    bool diagonal = false;
    for (std::int64_t c : m.row(r)) {
      const std::int64_t cp = col_pos[static_cast<std::size_t>(c)];
      if (cp < rp)
        return false;
      diagonal = diagonal || cp == rp;
    }
    if (!diagonal)
      return false;
  }
  return true;
}

ToposortReplay toposort_single_pe(const SerialMatrix &m) {
  const std::int64_t n = m.nrows();
  const SerialMatrix by_col = transpose_oracle(m);
  ToposortReplay out;
  out.row_position.assign(static_cast<std::size_t>(n), -1);
  out.col_position.assign(static_cast<std::size_t>(m.ncols()), -1);
  std::vector<std::int64_t> live(static_cast<std::size_t>(n)), colsum(static_cast<std::size_t>(n), 0);
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  std::vector<std::int64_t> ready;
  for (std::int64_t r = 0; r < n; ++r) {
    live[static_cast<std::size_t>(r)] = static_cast<std::int64_t>(m.row(r).size());
    for (std::int64_t c : m.row(r))
      colsum[static_cast<std::size_t>(r)] += c;
    if (live[static_cast<std::size_t>(r)] == 1)
      ready.push_back(r);
  }
  bool conflict = false;
  std::int64_t top = n - 1, placed_count = 0;
  while (!ready.empty()) {
    ++out.rounds;
    for (std::size_t i = 0; i < ready.size(); ++i) {
      out.row_position[static_cast<std::size_t>(ready[i])] = top - static_cast<std::int64_t>(i);
      placed[static_cast<std::size_t>(ready[i])] = true;
    }
    std::vector<std::int64_t> next;
    for (std::int64_t r : ready) {
      const std::int64_t c = colsum[static_cast<std::size_t>(r)];
      auto &cp = out.col_position[static_cast<std::size_t>(c)];
      if (cp != -1) {
        conflict = true;
        continue;
      }
      cp = out.row_position[static_cast<std::size_t>(r)];
      for (std::int64_t rr : by_col.row(c)) {
        if (placed[static_cast<std::size_t>(rr)])
          continue;
        colsum[static_cast<std::size_t>(rr)] -= c;
        if (--live[static_cast<std::size_t>(rr)] == 1)
          next.push_back(rr);
      }
    }
    top -= static_cast<std::int64_t>(ready.size());
    placed_count += static_cast<std::int64_t>(ready.size());
    std::sort(next.begin(), next.end());
    ready = std::move(next);
  }
  out.ok = !conflict && placed_count == n;
  return out;
}

std::int64_t triangles_brute_force(const SerialMatrix &lower) {
  const std::int64_t n = lower.nrows();
  if (n > 20'000)
    throw UsageError("graph too large for the brute-force triangle oracle");
  const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
  std::vector<std::uint64_t> adj(static_cast<std::size_t>(n) * words, 0);
  auto set = [&](std::int64_t a, std::int64_t b) {
    adj[static_cast<std::size_t>(a) * words + static_cast<std::size_t>(b / 64)] |= 1ULL << (b % 64);
  };
  auto has = [&](std::int64_t a, std::int64_t b) {
    return (adj[static_cast<std::size_t>(a) * words + static_cast<std::size_t>(b / 64)] >> (b % 64)) & 1ULL;
  };
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j : lower.row(i)) {
      set(i, j);
      set(j, i);
    }
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < i; ++j) {
      if (!has(i, j))
        continue;
      for (std::int64_t k = 0; k < j; ++k)
        if (has(i, k) && has(j, k))
          ++count;
    }
  return count;
}

} // namespace fabsp::apps
