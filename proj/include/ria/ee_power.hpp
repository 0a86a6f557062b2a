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

// Energy-efficient power allocation of one cell: the achievable-rate and
// consumed-power models, and Dinkelbach's method on their ratio with the
// SLNR powers of the inner design acting as per-user floors.

#include "ria/channel.hpp"
#include "ria/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace ria {

struct PowerModel {
    double rho = 0.39;
    double P_c = 1.0;
    double P_o = 10.0;
    int M = 8;
};

/// rho * d * sum p + M P_c + P_o. Powers are per stream.
inline double cell_power(std::span<const double> powers, const PowerModel& model,
                         Index streams = 1) {
    double sum = 0.0;
    for (double p : powers) {
        if (p < 0) throw ValidationError("cell_power: negative power");
        sum += p;
    }
    return model.rho * static_cast<double>(streams) * sum + model.M * model.P_c + model.P_o;
}

/// log2 det of a Hermitian positive-definite matrix.
inline double log2det_hpd(const Matrix& a) {
    Eigen::LLT<Matrix> llt(0.5 * (a + a.adjoint()));
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("log2det: covariance not positive definite");
    const Matrix& l = llt.matrixLLT();
    double sum = 0.0;
    for (Index i = 0; i < l.rows(); ++i) sum += std::log2(l(i, i).real());
    return 2.0 * sum;
}

/// Everything the rate of one cell needs, with the other cells' powers
/// frozen. S[k][j] is the received covariance at own user k per unit power of
/// own user j; ext[k] is noise plus all out-of-cell transmissions.
class CellRateModel {
public:
    CellRateModel(std::vector<std::vector<Matrix>> per_unit, std::vector<Matrix> external)
        : S_(std::move(per_unit)), ext_(std::move(external)) {}

    int users() const { return static_cast<int>(S_.size()); }

    double operator()(std::span<const double> p) const {
        const int K = users();
        double rate = 0.0;
        for (int k = 0; k < K; ++k) {
            Matrix j_minus = ext_[k];
            for (int j = 0; j < K; ++j)
                if (j != k && p[j] != 0.0) j_minus += p[j] * S_[k][j];
            if (p[k] == 0.0) continue;
            const Matrix j_all = j_minus + p[k] * S_[k][k];
            rate += log2det_hpd(j_all) - log2det_hpd(j_minus);
        }
        return rate;
    }

private:
    std::vector<std::vector<Matrix>> S_;
    std::vector<Matrix> ext_;
};

/// Which channel the rate is evaluated on.
enum class RateChannel { truth, estimate };

/// Inputs describing the whole network's transmit side at one instant.
/// F is per cell; directions and powers are indexed b * K + k.
struct TransmitPlan {
    std::vector<Matrix> F;
    std::vector<Matrix> directions;
    std::vector<double> powers;
};

/// Covariance W W^H + sigma2 ||F V||_F^2 I of one transmission seen through
/// channel h, the sigma2 term being the expected contribution of a
/// CN(0, sigma2) channel error.
inline Matrix received_covariance(const Matrix& h, const Matrix& F, const Matrix& v,
                                  double sigma2) {
    const Matrix fv = F * v;
    const Matrix w = h * fv;
    Matrix s = w * w.adjoint();
    if (sigma2 > 0) s.diagonal().array() += sigma2 * fv.squaredNorm();
    return s;
}

inline CellRateModel make_cell_rate_model(int b, const ChannelSet& ch, const TransmitPlan& plan,
                                          double delta2, RateChannel which, double sigma2) {
    const int B = ch.cells(), K = ch.users(), N = ch.rx();
    auto chan = [&](int c, int k, int s) -> const Matrix& {
        return which == RateChannel::truth ? ch.H(c, k, s) : ch.H_hat(c, k, s);
    };
    std::vector<std::vector<Matrix>> S(K, std::vector<Matrix>(K));
    std::vector<Matrix> ext(K);
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < K; ++j)
            S[k][j] = received_covariance(chan(b, k, b), plan.F[b], plan.directions[b * K + j], sigma2);
        ext[k] = delta2 * identity(N);
        for (int s = 0; s < B; ++s) {
            if (s == b) continue;
            for (int i = 0; i < K; ++i) {
                const double p = plan.powers[s * K + i];
                if (p == 0.0) continue;
                ext[k] += p * received_covariance(chan(b, k, s), plan.F[s],
                                                  plan.directions[s * K + i], sigma2);
            }
        }
    }
    return CellRateModel(std::move(S), std::move(ext));
}

/// Sum rate of cell b on the true channels with the plan's powers.
inline double cell_rate(int b, const ChannelSet& ch, const TransmitPlan& plan, double delta2) {
    const int K = ch.users();
    const auto model = make_cell_rate_model(b, ch, plan, delta2, RateChannel::truth, 0.0);
    const std::span<const double> own(plan.powers.data() + static_cast<std::size_t>(b) * K, K);
    for (double p : own)
        if (p < 0) throw ValidationError("cell_rate: negative power");
    return model(own);
}

/// Golden-section maximizer of a unimodal-ish objective over [lo, hi].
template <class Fn>
double golden_section_max(const Fn& f, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

struct SubproblemOptions {
    double tol = 1e-6;
    int max_sweeps = 100;
};

/// Cyclic golden-section ascent on R(p) - Q P_total(p) over floor_k <= p_k,
/// d * sum p <= budget. Each sweep searches every user's power alone, then
/// every pairwise transfer p_j - t, p_k + t, which is the only way to move
/// along the face where the budget binds. A move is kept only when the
/// objective improves, so the objective is monotone across sweeps.
template <class Rate>
std::vector<double> dinkelbach_subproblem(const Rate& rate, double Q, const PowerModel& model,
                                          std::span<const double> floors, double budget,
                                          Index streams, std::span<const double> start,
                                          const SubproblemOptions& opt = {}) {
    if (Q < 0) throw ValidationError("dinkelbach_subproblem: Q must be >= 0");
    const int K = static_cast<int>(floors.size());
    const double dd = static_cast<double>(streams);
    std::vector<double> p(start.begin(), start.end());
    for (int k = 0; k < K; ++k) p[k] = std::max(p[k], floors[k]);
    auto objective = [&](const std::vector<double>& x) {
        return rate(std::span<const double>(x)) - Q * cell_power(x, model, streams);
    };

    double value = objective(p);
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const double before = value;
        for (int k = 0; k < K; ++k) {
            double others = 0.0;
            for (int j = 0; j < K; ++j)
                if (j != k) others += p[j];
            const double hi = std::max(floors[k], budget / dd - others);
            const double lo = floors[k];
            if (hi <= lo) continue;

            std::vector<double> trial = p;
            auto along = [&](double x) {
                trial[k] = x;
                return objective(trial);
            };
            const double candidates[] = {golden_section_max(along, lo, hi), lo, hi};
            double best_x = p[k], best_v = value;
            for (double x : candidates) {
                const double v = along(x);
                if (v > best_v) {
                    best_v = v;
                    best_x = x;
                }
            }
            p[k] = best_x;
            value = best_v;
        }
        for (int j = 0; j < K; ++j)
            for (int k = j + 1; k < K; ++k) {
                // t moves power from j to k.
                const double lo = -(p[k] - floors[k]), hi = p[j] - floors[j];
                if (hi - lo <= 0) continue;
                std::vector<double> trial = p;
                auto along = [&](double t) {
                    trial[j] = p[j] - t;
                    trial[k] = p[k] + t;
                    return objective(trial);
                };
                const double candidates[] = {golden_section_max(along, lo, hi), lo, hi};
                double best_t = 0.0, best_v = value;
                for (double t : candidates) {
                    const double v = along(t);
                    if (v > best_v) {
                        best_v = v;
                        best_t = t;
                    }
                }
                if (best_t == 0.0) continue;
                std::vector<double> next = p;
                next[j] = best_t == hi ? floors[j] : std::max(floors[j], p[j] - best_t);
                next[k] = best_t == lo ? floors[k] : std::max(floors[k], p[k] + best_t);
                const double v = objective(next);
                if (v > value) {
                    p = std::move(next);
                    value = v;
                }
            }
        if (value - before < opt.tol) break;
    }
    return p;
}

struct EETracePoint {
    double Q = 0.0;
    double residual = 0.0;
};

struct EEResult {
    std::vector<double> powers;
    double Q = 0.0;
    double Q_initial = 0.0;
    int iterations = 0;
    std::vector<EETracePoint> trace;
    bool converged = false;

    /// First iteration l at which |Q_l - Q_{l-1}| < rel * Q_l.
    int iterations_to_settle(double rel = 1e-2) const {
        double prev = Q_initial;
        for (std::size_t l = 0; l < trace.size(); ++l) {
            if (std::abs(trace[l].Q - prev) < rel * std::abs(trace[l].Q)) return static_cast<int>(l) + 1;
            prev = trace[l].Q;
        }
        return static_cast<int>(trace.size());
    }
};

/// Dinkelbach iteration from zero power: Q_0 = R(0) / P_total(0), then
/// Q_l = R(p_l) / P_total(p_l) where p_l solves the subproblem at Q_{l-1}.
/// Stops when R(p_l) - Q_{l-1} P_total(p_l) drops to zeta or after L
/// iterations. The line searches start from the floors.
template <class Rate>
EEResult energy_efficient_powers(const Rate& rate, const PowerModel& model,
                                 std::span<const double> floors, double budget, Index streams,
                                 double zeta, int L, const SubproblemOptions& sub = {}) {
    double floor_sum = 0.0;
    for (double f : floors) {
        if (!(f >= 0)) throw ValidationError("energy_efficient_powers: floors must be >= 0");
        floor_sum += f;
    }
    if (floor_sum * static_cast<double>(streams) > budget * (1.0 + 1e-12))
        throw ValidationError("energy_efficient_powers: floors exceed the power budget");

    EEResult out;
    std::vector<double> p(floors.begin(), floors.end());
    auto ratio = [&](const std::vector<double>& x) {
        return rate(std::span<const double>(x)) / cell_power(x, model, streams);
    };
    double Q = ratio(std::vector<double>(p.size(), 0.0));
    out.Q_initial = Q;
    out.powers = p;
    out.Q = ratio(p);

    for (int l = 1; l <= L; ++l) {
        p = dinkelbach_subproblem(rate, Q, model, floors, budget, streams, p, sub);
        const double r = rate(std::span<const double>(p));
        const double ptot = cell_power(p, model, streams);
        const double residual = r - Q * ptot;
        const double q_next = r / ptot;
        out.trace.push_back({q_next, residual});
        out.iterations = l;
        if (q_next >= out.Q) {
            out.Q = q_next;
            out.powers = p;
        }
        Q = q_next;
        if (residual <= zeta) {
            out.converged = true;
            break;
        }
    }
    return out;
}

} // namespace ria
