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

#include "ria/config_io.hpp"
#include "ria/export.hpp"
#include "ria/sim.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ria;

namespace {

NetworkConfig short_config(std::uint64_t seed = 3) {
    NetworkConfig c;
    c.T = 3;
    c.T_train = 100;
    c.seed = seed;
    return c;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

void expect_same_record(const MetricsRecord& a, const MetricsRecord& b) {
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        EXPECT_EQ(a.cells[i].rate, b.cells[i].rate);
        EXPECT_EQ(a.cells[i].ee, b.cells[i].ee);
        EXPECT_EQ(a.cells[i].f_subspace_dist, b.cells[i].f_subspace_dist);
    }
    ASSERT_EQ(a.users.size(), b.users.size());
    for (std::size_t i = 0; i < a.users.size(); ++i) {
        EXPECT_EQ(a.users[i].slnr, b.users[i].slnr);
        EXPECT_EQ(a.users[i].power, b.users[i].power);
        EXPECT_EQ(a.users[i].lif_iui, b.users[i].lif_iui);
        EXPECT_EQ(a.users[i].lif_ici, b.users[i].lif_ici);
        EXPECT_EQ(a.users[i].ia_residual, b.users[i].ia_residual);
        EXPECT_EQ(a.users[i].u_subspace_dist, b.users[i].u_subspace_dist);
    }
}

} // namespace

TEST(Config, EmptyGivesDefaults) {
    const NetworkConfig c = parse_config(std::string());
    EXPECT_EQ(c, NetworkConfig{});
    EXPECT_EQ(c.B, 3);
    EXPECT_EQ(c.delta2, 1.0);
    EXPECT_EQ(c.rho, 0.39);
    EXPECT_NEAR(c.P_T, 15.8489319246, 1e-9);
}

TEST(Config, UnitsAndComments) {
    const NetworkConfig c = parse_config(
        "# scenario\nP_T = 30 dBm\nv = 36 km/h  # fast\ngamma_bar = 0 dB\nP_c = 2 W\ndelta_e=0.1\n");
    EXPECT_NEAR(c.P_T, 1.0, 1e-15);
    EXPECT_NEAR(c.v, 10.0, 1e-15);
    EXPECT_NEAR(c.gamma_bar, 1.0, 1e-15);
    EXPECT_EQ(c.P_c, 2.0);
    EXPECT_EQ(c.delta_e, 0.1);
}

TEST(Config, InvariantViolation) {
    EXPECT_THROW(parse_config("m_b = 3\n"), ValidationError);
    EXPECT_THROW(parse_config("alpha0 = 0.1\n"), ValidationError);
}

TEST(Config, ParseErrorsCarryLineAndKey) {
    try {
        parse_config("B = 3\n\nbogus = 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.key(), "bogus");
    }
    try {
        parse_config("K = four\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.key(), "K");
    }
    EXPECT_THROW(parse_config("B = 3\nB = 2\n"), ParseError);
    EXPECT_THROW(parse_config("P_T = 3 furlongs\n"), ParseError);
    EXPECT_THROW(parse_config("B\n"), ParseError);
    EXPECT_THROW(parse_config("step_norm = x3\n"), ParseError);
    EXPECT_THROW(load_config("/nonexistent/cfg.txt"), IoError);
}

TEST(Config, RoundTrip) {
    NetworkConfig c;
    c.P_T = dbm_to_watt(37.3);
    c.v = kmh_to_ms(61.0);
    c.delta_e = 0.123456789;
    c.seed = 0xfedcba9876543210ull;
    c.step_norm = StepNorm::x1;
    c.baseline = Baseline::oracle;
    c.receiver_init = ReceiverInit::reset;
    EXPECT_EQ(parse_config(format_config(c)), c);
    EXPECT_EQ(parse_config(format_config(NetworkConfig{})), NetworkConfig{});
}

TEST(Scenario, Deterministic) {
    const auto a = run_scenario(short_config());
    const auto b = run_scenario(short_config());
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t t = 0; t < a.size(); ++t) expect_same_record(a[t], b[t]);
    EXPECT_EQ(to_csv(a), to_csv(b));
}

TEST(Scenario, SeedsDiffer) {
    const auto a = run_scenario(short_config(3));
    const auto b = run_scenario(short_config(4));
    EXPECT_NE(a[0].cells[0].rate, b[0].cells[0].rate);
}

TEST(Scenario, SingleSlotIsOneInstant) {
    NetworkConfig c = short_config();
    c.T = 1;
    const auto recs = run_scenario(c);
    World w = make_world(c);
    const MetricsRecord r = run_instant(w);
    ASSERT_EQ(recs.size(), 1u);
    expect_same_record(recs[0], r);
}

TEST(Scenario, InvariantsHoldAcrossSlots) {
    NetworkConfig c = short_config(9);
    c.T = 5;
    EXPECT_NO_THROW(run_scenario(c, true));
    c.baseline = Baseline::nonrobust;
    EXPECT_NO_THROW(run_scenario(c, true));
    c.baseline = Baseline::oracle;
    EXPECT_NO_THROW(run_scenario(c, true));
}

TEST(Scenario, ZeroBudget) {
    NetworkConfig c = short_config();
    c.P_T = 0.0;
    for (const auto& r : run_scenario(c))
        for (const auto& cell : r.cells) {
            EXPECT_EQ(cell.rate, 0.0);
            EXPECT_EQ(cell.ee, 0.0);
        }
}

TEST(Scenario, StationaryWorldRepeats) {
    // Exact estimates, a frozen channel and no training: once the outer design
    // has converged a second slot reproduces the first.
    NetworkConfig c = short_config(5);
    c.delta_e = 0.0;
    c.v = 0.0;
    c.T_train = 0;
    World w = make_world(c);
    for (auto& g : w.gates) g.Pi = std::numeric_limits<double>::infinity();
    const MetricsRecord a = run_instant(w);
    const MetricsRecord b = run_instant(w);
    expect_same_record(a, b);
    EXPECT_FALSE(b.cells[0].gate_updated);
}

TEST(Scenario, EnergyEfficiencyIdentity) {
    const NetworkConfig c = short_config(6);
    const PowerModel pm = power_model(c);
    const auto recs = run_scenario(c);
    for (const auto& r : recs)
        for (int b = 0; b < c.B; ++b) {
            std::vector<double> p;
            for (const auto& u : r.users)
                if (u.cell == b) p.push_back(u.power);
            const double total = cell_power(p, pm, c.d);
            EXPECT_NEAR(r.cells[b].ee, r.cells[b].rate / total, 1e-12 * r.cells[b].ee);
        }
    // After rounding to 12 significant digits the identity holds to the
    // rounding of the three printed numbers.
    for (const auto& row : table_rows(recs)) {
        std::vector<double> p;
        for (const auto& other : table_rows(recs))
            if (other[0].i == row[0].i && other[1].i == row[1].i) p.push_back(other[6].x);
        const double total = cell_power(p, pm, c.d);
        EXPECT_NEAR(row[3].x, row[2].x / total, 2e-11 * row[3].x);
    }
}

TEST(Scenario, BaselinesShareSchema) {
    for (Baseline b : {Baseline::none, Baseline::nonrobust, Baseline::oracle}) {
        NetworkConfig c = short_config();
        c.baseline = b;
        const std::string csv = to_csv(run_scenario(c));
        const auto lines = split(csv, '\n');
        EXPECT_EQ(lines.size(), 1u + 3u * 12u);
        EXPECT_EQ(lines[0], "t,cell,rate_bps_hz,ee_bps_hz_per_w,user,slnr,power_w,lif_iui,lif_ici,"
                            "ia_residual,f_subspace_dist,u_subspace_dist,gate_updated,seed");
    }
}

TEST(Scenario, OracleReceiverMatchesMinorSubspace) {
    NetworkConfig c = short_config();
    c.baseline = Baseline::oracle;
    for (const auto& r : run_scenario(c)) {
        for (const auto& u : r.users) EXPECT_LE(u.u_subspace_dist, 1e-10);
        for (const auto& cell : r.cells) EXPECT_LE(cell.f_subspace_dist, 1e-10);
    }
}

TEST(Export, EmptyIsHeaderOnly) {
    EXPECT_EQ(split(to_csv({}), '\n').size(), 1u);
    EXPECT_EQ(to_json_value({}).size(), 0u);
}

TEST(Export, OneRowPerUser) {
    NetworkConfig c = short_config();
    c.T = 1;
    const auto recs = run_scenario(c);
    const auto lines = split(to_csv(recs), '\n');
    ASSERT_EQ(lines.size(), 13u);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        ASSERT_EQ(f.size(), export_columns.size());
        EXPECT_EQ(std::stoi(f[1]), static_cast<int>((i - 1) / 4));
        EXPECT_EQ(std::stoi(f[4]), static_cast<int>((i - 1) % 4));
        EXPECT_EQ(f[13], "3");
    }
}

TEST(Export, CsvJsonRoundTripBitExact) {
    const auto recs = run_scenario(short_config(7));
    const auto lines = split(to_csv(recs), '\n');
    const auto header = split(lines[0], ',');
    const nlohmann::json js = nlohmann::json::parse(to_json(recs));
    ASSERT_EQ(js.size(), lines.size() - 1);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split(lines[r], ',');
        const auto& obj = js[r - 1];
        ASSERT_EQ(obj.size(), header.size());
        for (std::size_t i = 0; i < header.size(); ++i) {
            const double from_csv = std::strtod(f[i].c_str(), nullptr);
            const double from_json = obj.at(header[i]).get<double>();
            EXPECT_EQ(from_csv, from_json) << header[i];
            // Re-rendering the parsed value reproduces the CSV text.
            EXPECT_EQ(real_cell(from_json).text, f[i]) << header[i];
        }
    }
}

TEST(Export, WriteFailureIsIoError) {
    EXPECT_THROW(export_records({}, ExportFormat::csv, "/nonexistent/dir/out.csv"), IoError);
    EXPECT_THROW(parse_format("xml"), ValidationError);
}

TEST(Sweep, SingleDropMatchesScenario) {
    SweepSpec spec;
    spec.axis = SweepAxis::transmit_power_dbm;
    spec.values = {40.0};
    spec.drops = 1;
    spec.base = short_config(11);
    const auto pts = sweep(spec);
    ASSERT_EQ(pts.size(), 1u);
    NetworkConfig c = with_axis(spec.base, spec.axis, 40.0);
    c.seed = drop_seed(spec.base.seed, 0);
    const DropSummary ref = summarize(run_scenario(c));
    EXPECT_EQ(pts[0].rate_mean, ref.rate);
    EXPECT_EQ(pts[0].ee_mean, ref.ee);
    EXPECT_EQ(pts[0].rate_se, 0.0);
    EXPECT_EQ(pts[0].drops, 1);
}

TEST(Sweep, IndependentOfThreadCount) {
    SweepSpec spec;
    spec.axis = SweepAxis::error_std;
    spec.values = {0.0, 0.1};
    spec.drops = 4;
    spec.base = short_config(12);
    spec.base.T = 1;
    spec.threads = 1;
    const auto a = sweep(spec);
    spec.threads = 4;
    const auto b = sweep(spec);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].rate_mean, b[i].rate_mean);
        EXPECT_EQ(a[i].ee_se, b[i].ee_se);
    }
    EXPECT_NE(a[0].per_drop[0].rate, a[0].per_drop[1].rate);
}

TEST(Sweep, RejectsBadSpecs) {
    SweepSpec spec;
    EXPECT_THROW(sweep(spec), ValidationError);
    spec.values = {1.0};
    spec.drops = 0;
    EXPECT_THROW(sweep(spec), ValidationError);
    EXPECT_THROW(parse_axis("snr"), ValidationError);
}

TEST(Sweep, MeanAndStandardError) {
    double m, se;
    mean_se({1.0, 2.0, 3.0, 4.0}, m, se);
    EXPECT_DOUBLE_EQ(m, 2.5);
    EXPECT_NEAR(se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}
