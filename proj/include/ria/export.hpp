// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Result tables: one row per (instant, cell, user). Every number is rounded
// to 12 significant digits before it is written, so CSV and JSON carry the
// same values.

#include "ria/error.hpp"
#include "ria/sim.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace ria {

enum class ExportFormat { csv, json };

inline ExportFormat parse_format(const std::string& s) {
    if (s == "csv") return ExportFormat::csv;
    if (s == "json") return ExportFormat::json;
    throw ValidationError("unknown format '" + s + "'");
}

inline constexpr std::array<const char*, 14> export_columns = {
    "t",       "cell",        "rate_bps_hz",     "ee_bps_hz_per_w", "user",
    "slnr",    "power_w",     "lif_iui",         "lif_ici",         "ia_residual",
    "f_subspace_dist", "u_subspace_dist", "gate_updated", "seed"};

/// A value as written: integers stay integers, reals go through %.12g.
struct Cell {
    bool integral = false;
    long long i = 0;
    std::uint64_t u = 0;
    bool is_unsigned = false;
    double x = 0.0;
    std::string text;
};

inline Cell real_cell(double v) {
    Cell c;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    c.text = buf;
    c.x = std::strtod(buf, nullptr);
    return c;
}

inline Cell int_cell(long long v) {
    Cell c;
    c.integral = true;
    c.i = v;
    c.text = std::to_string(v);
    return c;
}

inline Cell unsigned_cell(std::uint64_t v) {
    Cell c;
    c.integral = true;
    c.is_unsigned = true;
    c.u = v;
    c.text = std::to_string(v);
    return c;
}

using Row = std::array<Cell, export_columns.size()>;

inline std::vector<Row> table_rows(const std::vector<MetricsRecord>& records) {
    std::vector<Row> rows;
    for (const auto& r : records)
        for (const auto& u : r.users) {
            const auto& c = r.cells[u.cell];
            rows.push_back({int_cell(r.t), int_cell(u.cell), real_cell(c.rate), real_cell(c.ee),
                            int_cell(u.user), real_cell(u.slnr), real_cell(u.power),
                            real_cell(u.lif_iui), real_cell(u.lif_ici), real_cell(u.ia_residual),
                            real_cell(c.f_subspace_dist), real_cell(u.u_subspace_dist),
                            int_cell(c.gate_updated ? 1 : 0), unsigned_cell(r.seed)});
        }
    return rows;
}

inline std::string to_csv(const std::vector<MetricsRecord>& records) {
    std::ostringstream o;
    for (std::size_t i = 0; i < export_columns.size(); ++i)
        o << (i ? "," : "") << export_columns[i];
    o << "\n";
    for (const auto& row : table_rows(records)) {
        for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << row[i].text;
        o << "\n";
    }
    return o.str();
}

inline nlohmann::json to_json_value(const std::vector<MetricsRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : table_rows(records)) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            if (!c.integral) obj[export_columns[i]] = c.x;
            else if (c.is_unsigned) obj[export_columns[i]] = c.u;
            else obj[export_columns[i]] = c.i;
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

inline std::string to_json(const std::vector<MetricsRecord>& records) {
    return to_json_value(records).dump(1) + "\n";
}

inline std::string render(const std::vector<MetricsRecord>& records, ExportFormat f) {
    return f == ExportFormat::csv ? to_csv(records) : to_json(records);
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline void export_records(const std::vector<MetricsRecord>& records, ExportFormat f,
                           const std::string& path) {
    write_text(path, render(records, f));
}

inline std::string sweep_csv(const std::string& axis, const std::vector<SweepPoint>& points) {
    std::ostringstream o;
    o << axis << ",rate_mean,rate_se,ee_mean,ee_se,drops,infeasible_drops,failed_drops\n";
    for (const auto& p : points)
        o << real_cell(p.value).text << "," << real_cell(p.rate_mean).text << ","
          << real_cell(p.rate_se).text << "," << real_cell(p.ee_mean).text << ","
          << real_cell(p.ee_se).text << "," << p.drops << "," << p.infeasible_drops << ","
          << p.failed_drops << "\n";
    return o.str();
}

} // namespace ria
