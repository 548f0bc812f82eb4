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

#include "fabsp/bench/cli.hpp"

#include <charconv>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "fabsp/error.hpp"

namespace fabsp::bench {

apps::AppConfig CliArgs::config_for(apps::App app) const {
  apps::AppConfig cfg = apps::AppConfig::defaults_for(app);
  cfg.npes = pes;
  if (table_per_pe)
    cfg.table_per_pe = *table_per_pe;
  if (updates_per_pe)
    cfg.updates_per_pe = *updates_per_pe;
  if (reads_per_pe)
    cfg.reads_per_pe = *reads_per_pe;
  if (rows_per_pe)
    cfg.rows_per_pe = *rows_per_pe;
  if (nnz_per_row)
    cfg.nnz_per_row = *nnz_per_row;
  if (elements_per_pe)
    cfg.elements_per_pe = *elements_per_pe;
  cfg.seed = seed;
  cfg.buffer_items = buffer_items;
  cfg.ring_capacity = ring_capacity;
  cfg.inbox_capacity = inbox_capacity;
  cfg.validate = validate;
  return cfg;
}

namespace {

std::vector<std::string> app_choices() {
  std::vector<std::string> names;
  for (apps::App a : apps::kAllApps)
    names.emplace_back(apps::app_name(a));
  names.emplace_back("all");
  return names;
}

std::string join(const std::vector<std::string> &v) {
  std::string s;
  for (const auto &x : v)
    s += (s.empty() ? "" : ", ") + x;
  return s;
}

} // namespace

ParseOutcome parse_args(const std::vector<std::string> &argv, const char *default_pes) {
  CliArgs args;
  if (default_pes != nullptr && *default_pes != '\0') {
    const std::string_view text(default_pes);
    int p = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
    if (ec != std::errc() || end != text.data() + text.size() || p < 1 || p > 1024)
      return {std::nullopt, kExitUsage, "FABSP_PES must be an integer in [1, 1024], got '" + std::string(text) + "'\n"};
    args.pes = p;
  }

  const auto choices = app_choices();
  CLI::App cli{"Runs a mini-application on the in-process fabric and reports timing and traffic."};
  cli.name(argv.empty() ? "fabsp-bench" : argv.front());
  std::string app_text, format_text = "json", validate_text = "on";
  cli.add_option("--app", app_text, "one of: " + join(choices))->required()->check(CLI::IsMember(choices));
  cli.add_option("--pes", args.pes, "number of PEs (default 4, or FABSP_PES)")->check(CLI::Range(1, 1024));
  const auto non_negative = CLI::Range(std::int64_t{0}, std::numeric_limits<std::int64_t>::max());
  cli.add_option("--table-per-pe", args.table_per_pe, "table entries per PE")
      ->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  cli.add_option("--updates-per-pe", args.updates_per_pe, "histogram updates per PE")->check(non_negative);
  cli.add_option("--reads-per-pe", args.reads_per_pe, "index-gather reads per PE")->check(non_negative);
  cli.add_option("--rows-per-pe", args.rows_per_pe, "matrix rows per PE")->check(non_negative);
  cli.add_option("--nnz-per-row", args.nnz_per_row, "expected nonzeros per row")
      ->check(CLI::Range(0.0, std::numeric_limits<double>::max()));
  cli.add_option("--elements-per-pe", args.elements_per_pe, "permutation elements per PE")->check(non_negative);
  cli.add_option("--seed", args.seed, "input seed (default 0)");
  cli.add_option("--buffer-items", args.buffer_items, "aggregation buffer size B (default 1024)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
  cli.add_option("--ring-capacity", args.ring_capacity, "mailbox ring capacity C (default 64)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
  cli.add_option("--inbox-capacity", args.inbox_capacity, "frames per PE inbox (default 64)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
  cli.add_option("--format", format_text, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
  cli.add_option("--validate", validate_text, "on or off")->check(CLI::IsMember({"on", "off"}));

  std::vector<const char *> raw;
  for (const auto &a : argv)
    raw.push_back(a.c_str());
  if (raw.empty())
    raw.push_back("fabsp-bench");
  try {
    cli.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp &) {
    return {std::nullopt, kExitOk, cli.help()};
  } catch (const CLI::ParseError &e) {
    return {std::nullopt, kExitUsage, std::string(e.what()) + "\n" + cli.help()};
  }

  if (app_text == "all")
    args.apps.assign(apps::kAllApps.begin(), apps::kAllApps.end());
  else
    args.apps.push_back(*apps::parse_app(app_text));
  static const std::map<std::string, Format> formats{
      {"json", Format::Json}, {"csv", Format::Csv}, {"human", Format::Human}};
  args.format = formats.at(format_text);
  args.validate = validate_text == "on";
  return {std::move(args), kExitOk, {}};
}

RunStats run_benchmark(const apps::AppConfig &cfg) { return to_run_stats(apps::run_app(cfg)); }

int exit_code_for(std::span<const RunStats> runs) noexcept {
  for (const RunStats &s : runs)
    if (!s.valid)
      return kExitInvalid;
  return kExitOk;
}

int run_cli(const std::vector<std::string> &argv, std::ostream &out, std::ostream &err, const char *default_pes) {
  ParseOutcome parsed = parse_args(argv, default_pes);
  if (!parsed.args) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message;
    return parsed.exit_code;
  }
  const CliArgs &args = *parsed.args;
  std::vector<RunStats> runs;
  int code = kExitOk;
  for (apps::App app : args.apps) {
    try {
      runs.push_back(run_benchmark(args.config_for(app)));
    } catch (const UsageError &e) {
      err << apps::app_name(app) << ": " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception &e) {
      err << apps::app_name(app) << ": run failed: " << e.what() << "\n";
      code = kExitInvalid;
      continue;
    }
    const RunStats &s = runs.back();
    if (!s.diagnostic.empty())
      err << s.app << ": " << s.diagnostic << "\n";
  }
  out << emit_report(runs, args.format);
  return code == kExitOk ? exit_code_for(runs) : code;
}

} // namespace fabsp::bench
