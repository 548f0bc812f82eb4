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

#ifndef FABSP_APPS_APPS_HPP
#define FABSP_APPS_APPS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fabsp/fabric.hpp"

namespace fabsp::apps {

enum class App { Histogram, IndexGather, PermuteMatrix, RandomPermutation, TopologicalSort, Transpose, TriangleCount };

/// Emission order for "all".
inline constexpr std::array<App, 7> kAllApps = {App::Histogram,       App::IndexGather,     App::PermuteMatrix,
                                                App::RandomPermutation, App::TopologicalSort, App::Transpose,
                                                App::TriangleCount};

/// Short names used on the command line and in reports.
std::string_view app_name(App app) noexcept;
std::optional<App> parse_app(std::string_view name) noexcept;

struct AppConfig {
  App app = App::Histogram;
  int npes = 4;
  std::int64_t table_per_pe = 1000;
  std::int64_t updates_per_pe = 100'000;
  std::int64_t reads_per_pe = 100'000;
  std::int64_t rows_per_pe = 1000;
  double nnz_per_row = 10.0;
  std::int64_t elements_per_pe = 10'000;
  std::uint64_t seed = 0;
  std::size_t buffer_items = 1024;
  std::size_t ring_capacity = 64;
  std::size_t inbox_capacity = 64;
  bool validate = true;

  /// Desk-scale defaults for one app (index-gather uses a 10,000-entry table
  /// per PE, triangle counting 200 rows per PE with 8 nonzeros per row).
  static AppConfig defaults_for(App app);
  /// Throws UsageError on out-of-range sizes.
  void check() const;
};

struct AppReport {
  App app = App::Histogram;
  AppConfig config;
  double wall_time_seconds = 0.0;
  ConveyorStats stats; // summed over PEs and over the timed phase only
  bool valid = false;
  bool validated = false;
  /// Whether the gathered result equals the serial oracle bit for bit, where
  /// such an oracle exists for this app and PE count.
  std::optional<bool> matches_serial_oracle;
  std::uint64_t checksum = 0;
  std::optional<std::int64_t> rounds;
  std::string diagnostic;
};

AppReport run_histogram(const AppConfig &cfg);
AppReport run_index_gather(const AppConfig &cfg);
AppReport run_transpose(const AppConfig &cfg);
AppReport run_permute_matrix(const AppConfig &cfg);
AppReport run_random_permutation(const AppConfig &cfg);
AppReport run_topological_sort(const AppConfig &cfg);
AppReport run_triangle_count(const AppConfig &cfg);

/// Dispatches on cfg.app.
AppReport run_app(const AppConfig &cfg);

} // namespace fabsp::apps

#endif
