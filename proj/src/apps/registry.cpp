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

#include <cmath>
#include <utility>

#include "fabsp/apps/apps.hpp"
#include "fabsp/error.hpp"

namespace fabsp::apps {

namespace {
constexpr std::pair<App, std::string_view> kNames[] = {
    {App::Histogram, "histogram"},     {App::IndexGather, "ig"},        {App::PermuteMatrix, "permute"},
    {App::RandomPermutation, "randperm"}, {App::TopologicalSort, "toposort"}, {App::Transpose, "transpose"},
    {App::TriangleCount, "triangles"},
};
} // namespace

std::string_view app_name(App app) noexcept {
  for (const auto &[a, name] : kNames)
    if (a == app)
      return name;
  return "?";
}

std::optional<App> parse_app(std::string_view name) noexcept {
  for (const auto &[a, n] : kNames)
    if (n == name)
      return a;
  return std::nullopt;
}

AppConfig AppConfig::defaults_for(App app) {
  AppConfig cfg;
  cfg.app = app;
  if (app == App::IndexGather)
    cfg.table_per_pe = 10'000;
  if (app == App::TriangleCount) {
    cfg.rows_per_pe = 200;
    cfg.nnz_per_row = 8.0;
  }
  return cfg;
}

void AppConfig::check() const {
  if (npes < 1 || npes > 1024)
    throw UsageError("npes must be in [1, 1024]");
  if (table_per_pe < 1)
    throw UsageError("table_per_pe must be at least 1");
  if (updates_per_pe < 0 || reads_per_pe < 0 || rows_per_pe < 0 || elements_per_pe < 0)
    throw UsageError("per-PE sizes must be non-negative");
  if (!std::isfinite(nnz_per_row) || nnz_per_row < 0.0)
    throw UsageError("nnz_per_row must be a finite non-negative number");
  if (buffer_items < 1 || ring_capacity < 1 || inbox_capacity < 1)
    throw UsageError("buffer_items, ring_capacity and inbox_capacity must be at least 1");
}

AppReport run_app(const AppConfig &cfg) {
  switch (cfg.app) {
  case App::Histogram:
    return run_histogram(cfg);
  case App::IndexGather:
    return run_index_gather(cfg);
  case App::PermuteMatrix:
    return run_permute_matrix(cfg);
  case App::RandomPermutation:
    return run_random_permutation(cfg);
  case App::TopologicalSort:
    return run_topological_sort(cfg);
  case App::Transpose:
    return run_transpose(cfg);
  case App::TriangleCount:
    return run_triangle_count(cfg);
  }
  throw UsageError("unknown app");
}

} // namespace fabsp::apps
