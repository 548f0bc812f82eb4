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

#include "fabsp/bench/report.hpp"

#include <iomanip>
#include <sstream>
#include <vector>

namespace fabsp::bench {

using nlohmann::json;

std::string format_checksum(std::uint64_t checksum) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << checksum;
  return os.str();
}

RunStats to_run_stats(const apps::AppReport &rep) {
  const apps::AppConfig &c = rep.config;
  RunStats s;
  s.app = std::string(apps::app_name(rep.app));
  s.pes = c.npes;
  s.table_per_pe = c.table_per_pe;
  s.updates_per_pe = c.updates_per_pe;
  s.reads_per_pe = c.reads_per_pe;
  s.rows_per_pe = c.rows_per_pe;
  s.nnz_per_row = c.nnz_per_row;
  s.elements_per_pe = c.elements_per_pe;
  s.seed = c.seed;
  s.buffer_items = c.buffer_items;
  s.ring_capacity = c.ring_capacity;
  s.inbox_capacity = c.inbox_capacity;
  s.wall_time_seconds = rep.wall_time_seconds;
  s.items_sent_total = rep.stats.items_pushed;
  s.frames_sent_total = rep.stats.frames_sent;
  s.aggregation_ratio = s.frames_sent_total == 0
                            ? 0.0
                            : static_cast<double>(s.items_sent_total) / static_cast<double>(s.frames_sent_total);
  s.valid = rep.valid;
  s.validated = rep.validated;
  s.checksum = format_checksum(rep.checksum);
  s.rounds = rep.rounds;
  s.diagnostic = rep.diagnostic;
  return s;
}

json to_json(const RunStats &s) {
  return json{{"app", s.app},
              {"pes", s.pes},
              {"sizes",
               {{"table_per_pe", s.table_per_pe},
                {"updates_per_pe", s.updates_per_pe},
                {"reads_per_pe", s.reads_per_pe},
                {"rows_per_pe", s.rows_per_pe},
                {"nnz_per_row", s.nnz_per_row},
                {"elements_per_pe", s.elements_per_pe}}},
              {"seed", s.seed},
              {"buffer_items", s.buffer_items},
              {"ring_capacity", s.ring_capacity},
              {"inbox_capacity", s.inbox_capacity},
              {"wall_time_seconds", s.wall_time_seconds},
              {"items_sent_total", s.items_sent_total},
              {"frames_sent_total", s.frames_sent_total},
              {"aggregation_ratio", s.aggregation_ratio},
              {"valid", s.valid},
              {"validated", s.validated},
              {"checksum", s.checksum},
              {"rounds", s.rounds ? json(*s.rounds) : json(nullptr)},
              {"diagnostic", s.diagnostic}};
}

RunStats run_stats_from_json(const json &j) {
  RunStats s;
  j.at("app").get_to(s.app);
  j.at("pes").get_to(s.pes);
  const json &z = j.at("sizes");
  z.at("table_per_pe").get_to(s.table_per_pe);
  z.at("updates_per_pe").get_to(s.updates_per_pe);
  z.at("reads_per_pe").get_to(s.reads_per_pe);
  z.at("rows_per_pe").get_to(s.rows_per_pe);
  z.at("nnz_per_row").get_to(s.nnz_per_row);
  z.at("elements_per_pe").get_to(s.elements_per_pe);
  j.at("seed").get_to(s.seed);
  j.at("buffer_items").get_to(s.buffer_items);
  j.at("ring_capacity").get_to(s.ring_capacity);
  j.at("inbox_capacity").get_to(s.inbox_capacity);
  j.at("wall_time_seconds").get_to(s.wall_time_seconds);
  j.at("items_sent_total").get_to(s.items_sent_total);
  j.at("frames_sent_total").get_to(s.frames_sent_total);
  j.at("aggregation_ratio").get_to(s.aggregation_ratio);
  j.at("valid").get_to(s.valid);
  j.at("validated").get_to(s.validated);
  j.at("checksum").get_to(s.checksum);
  if (!j.at("rounds").is_null())
    s.rounds = j.at("rounds").get<std::int64_t>();
  j.at("diagnostic").get_to(s.diagnostic);
  return s;
}

namespace {

const char *const kCsvHeader = "app,pes,table_per_pe,updates_per_pe,reads_per_pe,rows_per_pe,nnz_per_row,"
                               "elements_per_pe,seed,buffer_items,ring_capacity,inbox_capacity,wall_time_seconds,"
                               "items_sent_total,frames_sent_total,aggregation_ratio,valid,validated,checksum,rounds";

std::string csv_row(const RunStats &s) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << s.app << ',' << s.pes << ',' << s.table_per_pe << ',' << s.updates_per_pe << ',' << s.reads_per_pe << ','
     << s.rows_per_pe << ',' << s.nnz_per_row << ',' << s.elements_per_pe << ',' << s.seed << ',' << s.buffer_items
     << ',' << s.ring_capacity << ',' << s.inbox_capacity << ',' << s.wall_time_seconds << ',' << s.items_sent_total
     << ',' << s.frames_sent_total << ',' << s.aggregation_ratio << ',' << (s.valid ? "true" : "false") << ','
     << (s.validated ? "true" : "false") << ',' << s.checksum << ',';
  if (s.rounds)
    os << *s.rounds;
  return os.str();
}

std::string human_table(std::span<const RunStats> runs) {
  std::vector<std::vector<std::string>> cells{
      {"app", "pes", "time_s", "items", "frames", "ratio", "valid", "checksum", "rounds"}};
  for (const RunStats &s : runs) {
    std::ostringstream t, r;
    t << std::fixed << std::setprecision(4) << s.wall_time_seconds;
    r << std::fixed << std::setprecision(1) << s.aggregation_ratio;
    cells.push_back({s.app, std::to_string(s.pes), t.str(), std::to_string(s.items_sent_total),
                     std::to_string(s.frames_sent_total), r.str(),
                     s.valid ? (s.validated ? "yes" : "yes (unchecked)") : "NO", s.checksum,
                     s.rounds ? std::to_string(*s.rounds) : "-"});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto &row : cells)
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto &row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      os << (c + 1 == row.size() ? "\n" : "  ");
    }
  }
  return os.str();
}

} // namespace

std::string emit_report(std::span<const RunStats> runs, Format format) {
  std::string out;
  switch (format) {
  case Format::Json:
    for (const RunStats &s : runs)
      out += to_json(s).dump() + "\n";
    break;
  case Format::Csv:
    out = std::string(kCsvHeader) + "\n";
    for (const RunStats &s : runs)
      out += csv_row(s) + "\n";
    break;
  case Format::Human:
    out = human_table(runs);
    break;
  }
  return out;
}

} // namespace fabsp::bench
