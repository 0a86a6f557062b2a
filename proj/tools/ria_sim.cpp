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

// ria_sim: run one scenario or a Monte Carlo sweep and write result tables.
//
//   ria_sim simulate --config net.cfg [--seed N] [--out r.csv] [--format csv|json]
//                    [--baseline none|nonrobust|oracle]
//   ria_sim sweep --config net.cfg --axis transmit_power_dbm --values 30,34,38
//                 --drops 100 --out sweep.csv [--threads N]
//
// Exit status: 0 success, 2 invalid input, 3 infeasible in every drop,
// 1 anything else.

#include "ria/ria.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int exit_validation = 2;
constexpr int exit_infeasible = 3;

ria::NetworkConfig load_or_default(const std::string& path) {
    return path.empty() ? ria::NetworkConfig{} : ria::load_config(path);
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ria::ValidationError("bad sweep value '" + item + "'");
        }
        if (pos != item.size()) throw ria::ValidationError("bad sweep value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ria::ValidationError("--values must list at least one value");
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else ria::write_text(path, text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust interference-alignment network simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", baseline = "none";
    std::optional<std::uint64_t> seed;
    auto* sim = app.add_subcommand("simulate", "run one scenario");
    sim->add_option("--config", config_path, "configuration file")->required();
    sim->add_option("--seed", seed, "override the configured seed");
    sim->add_option("--out", out_path, "output path (stdout if omitted)");
    sim->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sim->add_option("--baseline", baseline, "none, nonrobust or oracle")
        ->check(CLI::IsMember({"none", "nonrobust", "oracle"}));

    std::string axis, values;
    int drops = 1;
    unsigned threads = 0;
    auto* sw = app.add_subcommand("sweep", "Monte Carlo sweep over one axis");
    sw->add_option("--config", config_path, "configuration file")->required();
    sw->add_option("--axis", axis, "transmit_power_dbm, error_std or velocity_kmh")->required();
    sw->add_option("--values", values, "comma-separated axis values")->required();
    sw->add_option("--drops", drops, "drops per value")->required();
    sw->add_option("--out", out_path, "output path (stdout if omitted)");
    sw->add_option("--threads", threads, "worker threads (0: all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_validation;
    }

    try {
        ria::NetworkConfig cfg = load_or_default(config_path);
        if (*sim) {
            if (seed) cfg.seed = *seed;
            if (baseline != "none") cfg.baseline = ria::parse_baseline(baseline);
            ria::validate(cfg);
            const auto records = ria::run_scenario(cfg);
            emit(out_path, ria::render(records, ria::parse_format(format)));
            const bool all_bad = std::all_of(records.begin(), records.end(),
                                             [](const auto& r) { return r.all_infeasible(); });
            if (all_bad) {
                std::cerr << "ria_sim: no SLNR-feasible inner design in any slot\n";
                return exit_infeasible;
            }
            return 0;
        }

        ria::SweepSpec spec;
        spec.axis = ria::parse_axis(axis);
        spec.values = parse_values(values);
        spec.drops = drops;
        spec.base = cfg;
        spec.threads = threads;
        const auto points = ria::sweep(spec);
        emit(out_path, ria::sweep_csv(axis, points));
        for (const auto& p : points)
            for (const auto& d : p.per_drop)
                if (d.failed) std::cerr << "ria_sim: drop failed: " << d.error << "\n";
        const bool all_bad = std::all_of(points.begin(), points.end(), [](const auto& p) {
            return p.drops == p.infeasible_drops;
        });
        if (all_bad) {
            std::cerr << "ria_sim: every drop was SLNR-infeasible\n";
            return exit_infeasible;
        }
        return 0;
    } catch (const ria::ParseError& e) {
        std::cerr << "ria_sim: " << e.what() << " (line " << e.line() << ")\n";
        return exit_validation;
    } catch (const ria::ValidationError& e) {
        std::cerr << "ria_sim: invalid configuration: " << e.what() << "\n";
        return exit_validation;
    } catch (const ria::IoError& e) {
        std::cerr << "ria_sim: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "ria_sim: " << e.what() << "\n";
        return 1;
    }
}
