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

#ifndef FABSP_BENCH_CLI_HPP
#define FABSP_BENCH_CLI_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fabsp/apps/apps.hpp"
#include "fabsp/bench/report.hpp"

namespace fabsp::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

/// Parsed command line. Size flags that were not given stay empty so every app
/// keeps its own default under --app all.
struct CliArgs {
  std::vector<apps::App> apps;
  int pes = 4;
  std::optional<std::int64_t> table_per_pe, updates_per_pe, reads_per_pe, rows_per_pe, elements_per_pe;
  std::optional<double> nnz_per_row;
  std::uint64_t seed = 0;
  std::size_t buffer_items = 1024;
  std::size_t ring_capacity = 64;
  std::size_t inbox_capacity = 64;
  Format format = Format::Json;
  bool validate = true;

  apps::AppConfig config_for(apps::App app) const;
};

struct ParseOutcome {
  std::optional<CliArgs> args; // empty when the process should exit
  int exit_code = kExitOk;
  std::string message; // usage or help text
};

/// argv[0] is the program name. default_pes is used when --pes is absent
/// (the FABSP_PES value, if set).
ParseOutcome parse_args(const std::vector<std::string> &argv, const char *default_pes = nullptr);

RunStats run_benchmark(const apps::AppConfig &cfg);

/// kExitInvalid if any record is invalid, else kExitOk.
int exit_code_for(std::span<const RunStats> runs) noexcept;

/// Whole program: parse, run, emit. Returns the exit code.
int run_cli(const std::vector<std::string> &argv, std::ostream &out, std::ostream &err,
            const char *default_pes = nullptr);

} // namespace fabsp::bench

#endif
