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

#ifndef FABSP_BENCH_REPORT_HPP
#define FABSP_BENCH_REPORT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "fabsp/apps/apps.hpp"

namespace fabsp::bench {

enum class Format { Json, Csv, Human };

/// One benchmark record. Field names are the json keys.
struct RunStats {
  std::string app;
  int pes = 0;
  std::int64_t table_per_pe = 0;
  std::int64_t updates_per_pe = 0;
  std::int64_t reads_per_pe = 0;
  std::int64_t rows_per_pe = 0;
  double nnz_per_row = 0.0;
  std::int64_t elements_per_pe = 0;
  std::uint64_t seed = 0;
  std::uint64_t buffer_items = 0;
  std::uint64_t ring_capacity = 0;
  std::uint64_t inbox_capacity = 0;
  double wall_time_seconds = 0.0;
  std::uint64_t items_sent_total = 0;
  std::uint64_t frames_sent_total = 0;
  double aggregation_ratio = 0.0; // items / frames, 0 when nothing was sent
  bool valid = false;
  bool validated = false;
  std::string checksum; // 16 hex digits
  std::optional<std::int64_t> rounds;
  std::string diagnostic;

  friend bool operator==(const RunStats &, const RunStats &) = default;
};

RunStats to_run_stats(const apps::AppReport &rep);
std::string format_checksum(std::uint64_t checksum);

nlohmann::json to_json(const RunStats &s);
/// Throws nlohmann::json::exception on missing or mistyped fields.
RunStats run_stats_from_json(const nlohmann::json &j);

/// json: one object per line. csv: header line, then one row per record.
/// human: aligned table.
std::string emit_report(std::span<const RunStats> runs, Format format);

} // namespace fabsp::bench

#endif
