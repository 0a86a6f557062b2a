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

// Inner (per-user) beamformer of one cell under an SLNR floor.
//
// All quantities are expectations over the channel error, which turn every
// |(H_hat + dH) F V|^2 into tr{(H_hat^H H_hat + de^2 I) F V V^H F^H}. A cell
// sees K co-cell "intra" grams (one per own user) and one "inter" gram, the
// sum over every user of every other cell of the gram from this BS.

#include "ria/channel.hpp"
#include "ria/numerics.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

namespace ria {

/// H_hat^H H_hat + delta_e^2 I.
inline Matrix effective_gram(const Matrix& h_hat, double delta_e) {
    if (delta_e < 0) throw ValidationError("effective_gram: delta_e must be >= 0");
    Matrix g = h_hat.adjoint() * h_hat;
    g.diagonal().array() += delta_e * delta_e;
    return g;
}

struct CellGrams {
    std::vector<Matrix> intra; // toward own users, indexed by user
    Matrix inter;              // summed toward all users of other cells
};

inline CellGrams cell_grams(const ChannelSet& ch, int b, double delta_e) {
    CellGrams g;
    g.intra.reserve(ch.users());
    for (int k = 0; k < ch.users(); ++k) g.intra.push_back(effective_gram(ch.H_hat(b, k, b), delta_e));
    g.inter = Matrix::Zero(ch.tx(), ch.tx());
    for (int c = 0; c < ch.cells(); ++c) {
        if (c == b) continue;
        for (int i = 0; i < ch.users(); ++i) g.inter += effective_gram(ch.H_hat(c, i, b), delta_e);
    }
    return g;
}

/// tr{G F V V^H F^H} for a direction block V (m_b x d).
inline double projected_energy(const Matrix& gram, const Matrix& F, const Matrix& v) {
    const Matrix w = F * v;
    return (w.adjoint() * gram * w).trace().real();
}

/// Sum of the leakage grams seen by user k's beam (co-cell users j != k and
/// every out-of-cell user), before projection onto F.
inline Matrix leakage_gram(int k, const CellGrams& g) {
    Matrix l = g.inter;
    for (int j = 0; j < static_cast<int>(g.intra.size()); ++j)
        if (j != k) l += g.intra[j];
    return l;
}

inline double leakage_regularization(const Matrix& F, const CellGrams& g) {
    Matrix total = g.inter;
    for (const auto& gi : g.intra) total += gi;
    const double tr = (F.adjoint() * total * F).trace().real();
    return 1e-9 * (1.0 + tr) / static_cast<double>(F.cols());
}

/// A_k = sum_{j != k} ((delta2 + lambda_j) / delta2) F^H (G_j + G_inter) F + eps I.
inline Matrix leakage_matrix(int k, std::span<const double> multipliers, const Matrix& F,
                             const CellGrams& g, double delta2) {
    const Index m = F.cols();
    Matrix a = Matrix::Zero(m, m);
    const Matrix inter = F.adjoint() * g.inter * F;
    for (int j = 0; j < static_cast<int>(g.intra.size()); ++j) {
        if (j == k) continue;
        const double w = (delta2 + multipliers[j]) / delta2;
        a += w * (F.adjoint() * g.intra[j] * F + inter);
    }
    a = 0.5 * (a + a.adjoint()).eval();
    a.diagonal().array() += leakage_regularization(F, g);
    return a;
}

/// Top-d generalized eigenvectors of (M_k, A_k), M_k = F^H G_k F, with unit
/// column norms.
inline Matrix generalized_dominant(const Matrix& desired, const Matrix& leakage, Index d) {
    Eigen::LLT<Matrix> llt(leakage);
    if (llt.info() != Eigen::Success)
        throw SolverFailure("beamforming_directions: leakage matrix not positive definite");
    const Matrix l = llt.matrixL();
    const Matrix linv_m = l.triangularView<Eigen::Lower>().solve(desired);
    Matrix c = l.triangularView<Eigen::Lower>().solve(linv_m.adjoint()).adjoint();
    c = 0.5 * (c + c.adjoint()).eval();
    const EigenDecomposition eig = hermitian_eig(c);
    const Index m = desired.rows();

    Matrix v(m, d);
    for (Index i = 0; i < d; ++i) {
        const Vector y = eig.vectors.col(m - 1 - i);
        Vector x = l.adjoint().triangularView<Eigen::Upper>().solve(y);
        x /= x.norm();
        const double mu = eig.values(m - 1 - i);
        const double resid = (desired * x - mu * leakage * x).norm();
        const double scale = desired.norm() + std::abs(mu) * leakage.norm() + 1e-300;
        if (!std::isfinite(resid) || resid > 1e-7 * scale)
            throw SolverFailure("beamforming_directions: residual check failed");
        v.col(i) = x;
    }
    return v;
}

inline std::vector<Matrix> beamforming_directions(std::span<const double> multipliers,
                                                  const Matrix& F, const CellGrams& g,
                                                  double delta2, Index streams) {
    std::vector<Matrix> dirs;
    dirs.reserve(g.intra.size());
    for (int k = 0; k < static_cast<int>(g.intra.size()); ++k) {
        const Matrix desired = F.adjoint() * g.intra[k] * F;
        const Matrix a = leakage_matrix(k, multipliers, F, g, delta2);
        dirs.push_back(generalized_dominant(0.5 * (desired + desired.adjoint()), a, streams));
    }
    return dirs;
}

/// Expected SLNR of user k with per-stream power P: P s / (P l + delta2).
inline double slnr(int k, std::span<const Matrix> dirs, std::span<const double> powers,
                   const Matrix& F, const CellGrams& g, double delta2) {
    const double p = powers[k];
    if (p <= 0) return 0.0;
    const double s = projected_energy(g.intra[k], F, dirs[k]);
    const double l = projected_energy(leakage_gram(k, g), F, dirs[k]);
    return p * s / (p * l + delta2);
}

struct Leakage {
    double iui = 0.0;
    double ici = 0.0;
};

inline Leakage lif(int k, std::span<const Matrix> dirs, std::span<const double> powers,
                   const Matrix& F, const CellGrams& g) {
    Leakage out;
    const double p = powers[k];
    for (int j = 0; j < static_cast<int>(g.intra.size()); ++j)
        if (j != k) out.iui += p * projected_energy(g.intra[j], F, dirs[k]);
    out.ici = p * projected_energy(g.inter, F, dirs[k]);
    return out;
}

/// Sum over users of the inter-user leakage, the inner-design objective.
inline double inner_objective(std::span<const Matrix> dirs, std::span<const double> powers,
                              const Matrix& F, const CellGrams& g) {
    double total = 0.0;
    for (int k = 0; k < static_cast<int>(g.intra.size()); ++k)
        for (int j = 0; j < static_cast<int>(g.intra.size()); ++j)
            if (j != k) total += powers[k] * projected_energy(g.intra[j], F, dirs[k]);
    return total;
}

struct PowerSolution {
    std::vector<double> powers;
    bool budget_scaled = false;
};

/// Per-stream powers meeting every SLNR target with equality. User k's SLNR
/// depends on its own power only, so the system is diagonal:
/// P_k (s_k / gamma_k - l_k) = delta2. Scaled uniformly down when
/// d * sum P_k exceeds the budget.
inline PowerSolution solve_slnr_powers(std::span<const Matrix> dirs, const Matrix& F,
                                       const CellGrams& g, std::span<const double> gamma_bar,
                                       double delta2, double budget, Index streams) {
    const int K = static_cast<int>(g.intra.size());
    PowerSolution out;
    out.powers.resize(K);
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        if (!(gamma_bar[k] > 0)) throw ValidationError("solve_slnr_powers: gamma_bar must be > 0");
        const double s = projected_energy(g.intra[k], F, dirs[k]);
        const double l = projected_energy(leakage_gram(k, g), F, dirs[k]);
        const double coeff = s / gamma_bar[k] - l;
        if (!(coeff > 0) || !std::isfinite(coeff))
            throw InfeasibleSLNR("solve_slnr_powers: SLNR target unreachable for user " +
                                 std::to_string(k));
        out.powers[k] = delta2 / coeff;
        total += out.powers[k] * static_cast<double>(streams);
    }
    if (total > budget) {
        const double scale = total > 0 ? budget / total : 0.0;
        for (double& p : out.powers) p *= scale;
        out.budget_scaled = true;
    }
    return out;
}

/// lambda_k <- lambda_k * clip(gamma_bar_k / gamma_k, 1/2, 2).
inline std::vector<double> update_multipliers(std::span<const double> multipliers,
                                              std::span<const double> gamma_bar,
                                              std::span<const double> achieved) {
    std::vector<double> out(multipliers.begin(), multipliers.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double ratio = achieved[k] > 0 ? gamma_bar[k] / achieved[k]
                                             : std::numeric_limits<double>::infinity();
        out[k] = std::max(0.0, out[k] * std::clamp(ratio, 0.5, 2.0));
    }
    return out;
}

struct InnerSolution {
    std::vector<Matrix> directions;
    std::vector<double> powers;
    std::vector<double> multipliers;
    std::vector<double> achieved_slnr;
    int sweeps = 0;
    bool converged = false;
    bool budget_scaled = false;
};

struct InnerOptions {
    double gamma_bar = 1.0;
    double delta2 = 1.0;
    double budget = 1.0;
    Index streams = 1;
    int max_sweeps = 100;
    double tol = 1e-4;
};

inline double max_relative_gap(std::span<const double> achieved, std::span<const double> target) {
    double worst = 0.0;
    for (std::size_t k = 0; k < achieved.size(); ++k)
        worst = std::max(worst, std::abs(achieved[k] - target[k]) / target[k]);
    return worst;
}

/// Alternates directions, SLNR-equality powers and multiplier updates until
/// every achieved SLNR is within tol of its target. Throws InfeasibleSLNR.
inline InnerSolution solve_inner(const Matrix& F, const CellGrams& g, const InnerOptions& opt) {
    const int K = static_cast<int>(g.intra.size());
    const std::vector<double> target(K, opt.gamma_bar);
    std::vector<double> lambda(K, opt.delta2);

    InnerSolution best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        auto dirs = beamforming_directions(lambda, F, g, opt.delta2, opt.streams);
        auto ps = solve_slnr_powers(dirs, F, g, target, opt.delta2, opt.budget, opt.streams);
        std::vector<double> achieved(K);
        for (int k = 0; k < K; ++k) achieved[k] = slnr(k, dirs, ps.powers, F, g, opt.delta2);

        const double gap = max_relative_gap(achieved, target);
        if (gap < best_gap) {
            best_gap = gap;
            best.directions = std::move(dirs);
            best.powers = ps.powers;
            best.multipliers = lambda;
            best.achieved_slnr = achieved;
            best.budget_scaled = ps.budget_scaled;
        }
        best.sweeps = sweep;
        if (gap < opt.tol) {
            best.converged = true;
            break;
        }
        lambda = update_multipliers(lambda, target, achieved);
    }
    return best;
}

} // namespace ria
