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

// Per-slot pipeline and Monte Carlo drivers. One slot runs, in order:
// channel evolution, gated outer design per cell, inner design per cell,
// energy-efficient powers per cell (Gauss-Seidel over cells), receive
// filter training per user, metrics.

#include "ria/channel.hpp"
#include "ria/ee_power.hpp"
#include "ria/inner.hpp"
#include "ria/network_config.hpp"
#include "ria/outer.hpp"
#include "ria/receive.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

namespace ria {

struct UserMetrics {
    int cell = 0;
    int user = 0;
    double slnr = 0.0;        // expected SLNR at the final powers
    double inner_slnr = 0.0;  // SLNR reached by the inner design
    double power = 0.0;       // per-stream watts
    double lif_iui = 0.0;
    double lif_ici = 0.0;
    double ia_residual = 0.0;
    double ia_residual_untrained = 0.0;
    double u_subspace_dist = 0.0;
    bool desired_full_rank = false;
};

struct CellMetrics {
    double rate = 0.0; // bits/s/Hz on the true channels
    double ee = 0.0;   // rate / total consumed power
    double total_power = 0.0;
    double f_subspace_dist = 0.0;
    bool gate_updated = false;
    bool inner_feasible = true;
    bool inner_converged = true;
    bool budget_scaled = false;
    EEResult ee_result;
};

struct MetricsRecord {
    int t = 0;
    std::uint64_t seed = 0;
    std::vector<CellMetrics> cells;
    std::vector<UserMetrics> users; // cell-major

    bool any_infeasible() const {
        return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return !c.inner_feasible; });
    }
    bool all_infeasible() const {
        return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return !c.inner_feasible; });
    }
};

struct World {
    NetworkConfig cfg;
    Rng rng{1};
    double alpha = 1.0;
    int t = 0;
    ChannelSet channels;
    std::vector<SMGateState> gates;
    std::vector<Matrix> F_init;
    std::vector<Matrix> U; // per (b, k)
    TransmitPlan plan;
    bool check_invariants = false;
};

inline World make_world(const NetworkConfig& cfg) {
    validate(cfg);
    World w;
    w.cfg = cfg;
    w.rng = Rng(cfg.seed);
    w.alpha = doppler_alpha(cfg.v, cfg.f_c, cfg.Omega);
    w.channels = draw_channels(cfg, w.rng);
    w.gates.resize(cfg.B);
    for (auto& g : w.gates) g.eta = cfg.eta;
    for (int b = 0; b < cfg.B; ++b) w.F_init.push_back(random_frame(cfg.M, cfg.m_b, w.rng));
    for (int i = 0; i < cfg.B * cfg.K; ++i) w.U.push_back(random_frame(cfg.N, cfg.d, w.rng));
    return w;
}

/// Error standard deviation the beamformers design against.
inline double design_delta_e(const NetworkConfig& c) {
    if (c.baseline == Baseline::nonrobust) return 0.0;
    return std::sqrt(c.N * c.error_entry_variance());
}

inline double design_entry_variance(const NetworkConfig& c) {
    return c.baseline == Baseline::nonrobust ? 0.0 : c.error_entry_variance();
}

inline PowerModel power_model(const NetworkConfig& c) { return {c.rho, c.P_c, c.P_o, c.M}; }

inline InnerOptions inner_options(const NetworkConfig& c) {
    InnerOptions o;
    o.gamma_bar = c.gamma_bar;
    o.delta2 = c.delta2;
    o.budget = c.P_T;
    o.streams = c.d;
    o.max_sweeps = c.inner_max_sweeps;
    o.tol = c.inner_tol;
    return o;
}

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw SolverFailure(std::string("invariant violated: ") + what);
}

} // namespace detail

inline MetricsRecord run_instant(World& w) {
    const NetworkConfig& c = w.cfg;
    const int B = c.B, K = c.K;
    if (w.t > 0) w.channels = evolve(w.channels, w.alpha, c.error_entry_variance(), w.rng);
    const double de = design_delta_e(c);

    MetricsRecord rec;
    rec.t = w.t;
    rec.seed = c.seed;
    rec.cells.resize(B);
    rec.users.resize(static_cast<std::size_t>(B) * K);

    // Outer beamformers.
    std::vector<Matrix> phi(B);
    w.plan.F.assign(B, Matrix());
    const CggmOptions copt = cggm_options(c);
    for (int b = 0; b < B; ++b) {
        phi[b] = interference_covariance(w.channels, b, de, c.phi_error_coeff);
        if (c.baseline == Baseline::oracle) {
            w.plan.F[b] = minor_subspace(phi[b], c.m_b);
            rec.cells[b].gate_updated = true;
        } else {
            const SMStep step = sm_update(phi[b], w.gates[b], copt, w.F_init[b]);
            w.plan.F[b] = step.F;
            rec.cells[b].gate_updated = step.updated;
        }
    }

    // Inner beamformers.
    const InnerOptions iopt = inner_options(c);
    std::vector<CellGrams> grams(B);
    std::vector<double> floors(static_cast<std::size_t>(B) * K, 0.0);
    w.plan.directions.assign(static_cast<std::size_t>(B) * K, Matrix());
    w.plan.powers.assign(static_cast<std::size_t>(B) * K, 0.0);
    for (int b = 0; b < B; ++b) {
        grams[b] = cell_grams(w.channels, b, de);
        auto& cm = rec.cells[b];
        try {
            const InnerSolution s = solve_inner(w.plan.F[b], grams[b], iopt);
            cm.inner_converged = s.converged;
            cm.budget_scaled = s.budget_scaled;
            for (int k = 0; k < K; ++k) {
                w.plan.directions[b * K + k] = s.directions[k];
                floors[b * K + k] = s.powers[k];
                rec.users[b * K + k].inner_slnr = s.achieved_slnr[k];
            }
        } catch (const InfeasibleSLNR&) {
            // No SLNR floor is reachable; keep the unweighted directions and
            // let the power allocation start from zero.
            cm.inner_feasible = false;
            cm.inner_converged = false;
            const std::vector<double> lambda(K, c.delta2);
            const auto dirs = beamforming_directions(lambda, w.plan.F[b], grams[b], c.delta2, c.d);
            for (int k = 0; k < K; ++k) w.plan.directions[b * K + k] = dirs[k];
        }
    }
    w.plan.powers = floors;

    // Energy-efficient powers, cell by cell with the others frozen.
    const PowerModel pm = power_model(c);
    const double sigma2 = design_entry_variance(c);
    for (int b = 0; b < B; ++b) {
        const auto model = make_cell_rate_model(b, w.channels, w.plan, c.delta2,
                                                RateChannel::estimate, sigma2);
        const std::span<const double> fl(floors.data() + static_cast<std::size_t>(b) * K, K);
        EEResult ee = energy_efficient_powers(model, pm, fl, c.P_T, c.d, c.zeta, c.L_max);
        for (int k = 0; k < K; ++k) w.plan.powers[b * K + k] = ee.powers[k];
        rec.cells[b].ee_result = std::move(ee);
    }

    // Receive filters.
    for (int b = 0; b < B; ++b)
        for (int k = 0; k < K; ++k) {
            const int idx = b * K + k;
            auto& um = rec.users[idx];
            const Matrix q = received_covariance_analytic(k, b, w.channels, w.plan, c.delta2,
                                                          TrainingMode::interference_only);
            const Matrix target = minor_subspace(q, c.d);
            if (c.receiver_init == ReceiverInit::reset) w.U[idx] = random_frame(c.N, c.d, w.rng);
            um.ia_residual_untrained = ia_residual(k, b, w.U[idx], w.channels, w.plan).residual;
            if (c.baseline == Baseline::oracle) {
                w.U[idx] = target;
            } else {
                auto source = [&] {
                    return training_sample(k, b, w.channels, w.plan, c.delta2, c.training_mode, w.rng);
                };
                w.U[idx] = track(w.U[idx], source, c.T_train, c.alpha0, c.step_norm).state.U;
            }
            const IAResidual r = ia_residual(k, b, w.U[idx], w.channels, w.plan);
            um.ia_residual = r.residual;
            um.desired_full_rank = r.desired_full_rank;
            um.u_subspace_dist = subspace_distance(w.U[idx], target);
        }

    // Metrics.
    for (int b = 0; b < B; ++b) {
        auto& cm = rec.cells[b];
        const std::span<const double> own(w.plan.powers.data() + static_cast<std::size_t>(b) * K, K);
        cm.rate = cell_rate(b, w.channels, w.plan, c.delta2);
        cm.total_power = cell_power(own, pm, c.d);
        cm.ee = cm.rate / cm.total_power;
        cm.f_subspace_dist = subspace_distance(w.plan.F[b], minor_subspace(phi[b], c.m_b));
        const std::span<const Matrix> dirs(w.plan.directions.data() + static_cast<std::size_t>(b) * K, K);
        for (int k = 0; k < K; ++k) {
            auto& um = rec.users[b * K + k];
            um.cell = b;
            um.user = k;
            um.power = own[k];
            um.slnr = slnr(k, dirs, own, w.plan.F[b], grams[b], c.delta2);
            const Leakage l = lif(k, dirs, own, w.plan.F[b], grams[b]);
            um.lif_iui = l.iui;
            um.lif_ici = l.ici;
        }
    }

    if (w.check_invariants) {
        using detail::require;
        for (int b = 0; b < B; ++b) {
            require(orthonormality_error(w.plan.F[b]) <= 1e-10, "F orthonormal");
            const auto& cm = rec.cells[b];
            require(std::isfinite(cm.rate) && std::isfinite(cm.ee), "finite cell metrics");
            double sum = 0.0;
            for (int k = 0; k < K; ++k) {
                require(w.plan.powers[b * K + k] >= floors[b * K + k], "powers above floors");
                sum += w.plan.powers[b * K + k];
            }
            require(sum * c.d <= c.P_T * (1 + 1e-9) + 1e-15, "power budget");
            const auto& tr = cm.ee_result.trace;
            double prev = cm.ee_result.Q_initial;
            for (const auto& p : tr) {
                require(p.Q >= prev - 1e-9, "EE trace nondecreasing");
                prev = p.Q;
            }
        }
        for (int i = 0; i < B * K; ++i)
            require(orthonormality_error(w.U[i]) <= 1e-8, "U orthonormal");
    }
    ++w.t;
    return rec;
}

inline std::vector<MetricsRecord> run_scenario(const NetworkConfig& cfg, bool check = false) {
    World w = make_world(cfg);
    w.check_invariants = check;
    std::vector<MetricsRecord> out;
    out.reserve(cfg.T);
    for (int t = 0; t < cfg.T; ++t) out.push_back(run_instant(w));
    return out;
}

enum class SweepAxis { transmit_power_dbm, error_std, velocity_kmh };

inline SweepAxis parse_axis(const std::string& name) {
    if (name == "transmit_power_dbm") return SweepAxis::transmit_power_dbm;
    if (name == "error_std") return SweepAxis::error_std;
    if (name == "velocity_kmh") return SweepAxis::velocity_kmh;
    throw ValidationError("unknown sweep axis '" + name + "'");
}

inline NetworkConfig with_axis(NetworkConfig c, SweepAxis axis, double value) {
    switch (axis) {
    case SweepAxis::transmit_power_dbm: c.P_T = dbm_to_watt(value); break;
    case SweepAxis::error_std: c.delta_e = value; break;
    case SweepAxis::velocity_kmh: c.v = kmh_to_ms(value); break;
    }
    return c;
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::transmit_power_dbm;
    std::vector<double> values;
    int drops = 1;
    NetworkConfig base;
    unsigned threads = 0; // 0: hardware concurrency
};

/// Scenario averages of one drop.
struct DropSummary {
    double rate = 0.0;
    double ee = 0.0;
    bool infeasible = false; // every inner solve of the drop failed
    bool failed = false;     // the drop threw
    std::string error;
};

struct SweepPoint {
    double value = 0.0;
    double rate_mean = 0.0, rate_se = 0.0;
    double ee_mean = 0.0, ee_se = 0.0;
    int drops = 0;
    int infeasible_drops = 0;
    int failed_drops = 0;
    std::vector<DropSummary> per_drop;
};

inline std::uint64_t drop_seed(std::uint64_t base, int drop) {
    return mix_seed(base, static_cast<std::uint64_t>(drop));
}

inline DropSummary summarize(const std::vector<MetricsRecord>& recs) {
    DropSummary s;
    std::size_t n = 0;
    bool all_bad = true;
    for (const auto& r : recs) {
        for (const auto& c : r.cells) {
            s.rate += c.rate;
            s.ee += c.ee;
            ++n;
        }
        all_bad = all_bad && r.all_infeasible();
    }
    if (n) {
        s.rate /= static_cast<double>(n);
        s.ee /= static_cast<double>(n);
    }
    s.infeasible = all_bad;
    return s;
}

inline void mean_se(const std::vector<double>& x, double& mean, double& se) {
    mean = se = 0.0;
    if (x.empty()) return;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    if (x.size() < 2) return;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

/// Runs fn(i) for i in [0, n) on a small thread pool.
template <class Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) fn(i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

/// Drop i of every axis value uses the same seed, so points are paired.
inline std::vector<SweepPoint> sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ValidationError("sweep: values must be nonempty");
    if (spec.drops < 1) throw ValidationError("sweep: drops must be >= 1");
    const int nv = static_cast<int>(spec.values.size());
    for (double v : spec.values) validate(with_axis(spec.base, spec.axis, v));

    std::vector<DropSummary> all(static_cast<std::size_t>(nv) * spec.drops);
    parallel_for(nv * spec.drops, spec.threads, [&](int job) {
        const int vi = job / spec.drops, drop = job % spec.drops;
        NetworkConfig c = with_axis(spec.base, spec.axis, spec.values[vi]);
        c.seed = drop_seed(spec.base.seed, drop);
        DropSummary& s = all[job];
        try {
            s = summarize(run_scenario(c));
        } catch (const Error& e) {
            s.failed = true;
            s.error = e.what();
        }
    });

    std::vector<SweepPoint> out(nv);
    for (int vi = 0; vi < nv; ++vi) {
        SweepPoint& p = out[vi];
        p.value = spec.values[vi];
        std::vector<double> rates, ees;
        for (int drop = 0; drop < spec.drops; ++drop) {
            const DropSummary& s = all[static_cast<std::size_t>(vi) * spec.drops + drop];
            p.per_drop.push_back(s);
            if (s.failed) {
                ++p.failed_drops;
                continue;
            }
            if (s.infeasible) ++p.infeasible_drops;
            rates.push_back(s.rate);
            ees.push_back(s.ee);
        }
        p.drops = static_cast<int>(rates.size());
        mean_se(rates, p.rate_mean, p.rate_se);
        mean_se(ees, p.ee_mean, p.ee_se);
    }
    return out;
}

} // namespace ria
