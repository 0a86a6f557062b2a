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

// Receive filters: streaming minor-subspace tracking of each user's received
// covariance (DPM, and FDPM with Householder normalization), plus the
// interference-alignment residual of a set of filters.

#include "ria/channel.hpp"
#include "ria/ee_power.hpp"
#include "ria/network_config.hpp"
#include "ria/numerics.hpp"

#include <cmath>
#include <vector>

namespace ria {

struct FDPMState {
    Matrix U;
    double alpha0 = -0.05;
    long samples_seen = 0;
};

/// Reflector H with H x_bar = e^{j theta} ||x_bar|| e_1, theta the phase of
/// x_bar's first entry.
inline Matrix householder(const Vector& x_bar) {
    if (!x_bar.allFinite()) throw NonFinite("householder: non-finite input");
    const Index d = x_bar.size();
    const double nrm = x_bar.norm();
    const cplx phase = std::polar(1.0, std::arg(x_bar(0)));
    Vector a = x_bar;
    a(0) -= phase * nrm;
    const double an = a.norm();
    if (!(an >= 1e-14 * nrm) || an == 0.0) return identity(d);
    return identity(d) - (2.0 / (an * an)) * (a * a.adjoint());
}

/// U' = orthonormalize(U + alpha x x_bar^H).
inline Matrix dpm_step(const Matrix& U, const Vector& x, double alpha) {
    const Vector xb = U.adjoint() * x;
    return orthonormalize(U + alpha * x * xb.adjoint());
}

/// FDPM recursion. With x_bar = U^H x and z = U x_bar:
///   B = z / ||x_bar|| + alpha ||x_bar|| x,  C = B / ||B|| - z / ||x_bar||,
///   U' = U + C x_bar^H / ||x_bar||.
/// This is U + alpha x x_bar^H followed by a Householder rotation that moves
/// the update onto a single column, then normalizing that column.
inline Matrix fdpm_update(const Matrix& U, const Vector& x, double alpha) {
    const Vector xb = U.adjoint() * x;
    const double nb = xb.norm();
    if (!(nb > 1e-14)) return U;
    const Vector z = U * xb;
    const Vector b = z / nb + (alpha * nb) * x;
    const Vector c = b / b.norm() - z / nb;
    return U + c * (xb.adjoint() / nb);
}

inline FDPMState fdpm_step(const FDPMState& state, const Vector& x, double alpha) {
    FDPMState out = state;
    out.U = fdpm_update(state.U, x, alpha);
    ++out.samples_seen;
    return out;
}

inline double step_size(double alpha0, const Vector& x, StepNorm norm) {
    const double n2 = x.squaredNorm();
    if (!(n2 > 0)) return 0.0;
    return norm == StepNorm::x2 ? alpha0 / n2 : alpha0 / std::sqrt(n2);
}

struct TrackResult {
    FDPMState state;
    std::vector<double> energy; // ||U^H x||^2 before each step
};

template <class Source>
TrackResult track(const Matrix& U0, Source&& next_sample, long count, double alpha0,
                  StepNorm norm = StepNorm::x2) {
    TrackResult out;
    out.state.U = U0;
    out.state.alpha0 = alpha0;
    out.energy.reserve(static_cast<std::size_t>(std::max(0L, count)));
    for (long i = 0; i < count; ++i) {
        const Vector x = next_sample();
        out.energy.push_back((out.state.U.adjoint() * x).squaredNorm());
        out.state = fdpm_step(out.state, x, step_size(alpha0, x, norm));
    }
    return out;
}

/// Stream of N-dimensional samples with covariance R = A A^H, x = A w.
class GaussianStream {
public:
    GaussianStream(Matrix factor, Rng& rng) : A_(std::move(factor)), rng_(rng) {}
    Vector operator()() {
        Vector w(A_.cols());
        for (Index i = 0; i < w.size(); ++i) w(i) = rng_.cn(1.0);
        return A_ * w;
    }

private:
    Matrix A_;
    Rng& rng_;
};

/// Received signal of user k in cell b while the plan is frozen:
/// sum over transmissions of H F V_dir sqrt(P) s + n, s ~ CN(0, I_d),
/// n ~ CN(0, delta2 I). interference_only silences the desired stream.
inline Vector training_sample(int k, int b, const ChannelSet& ch, const TransmitPlan& plan,
                              double delta2, TrainingMode mode, Rng& rng) {
    const int B = ch.cells(), K = ch.users(), N = ch.rx();
    Vector x(N);
    for (Index i = 0; i < N; ++i) x(i) = rng.cn(delta2);
    for (int s = 0; s < B; ++s)
        for (int i = 0; i < K; ++i) {
            const bool desired = s == b && i == k;
            const Matrix& v = plan.directions[s * K + i];
            Vector sym(v.cols());
            for (Index q = 0; q < sym.size(); ++q) sym(q) = rng.cn(1.0);
            if (desired && mode == TrainingMode::interference_only) continue;
            const double p = plan.powers[s * K + i];
            if (p == 0.0) continue;
            x += std::sqrt(p) * (ch.H(b, k, s) * (plan.F[s] * (v * sym)));
        }
    return x;
}

/// Analytic covariance of training_sample.
inline Matrix received_covariance_analytic(int k, int b, const ChannelSet& ch,
                                           const TransmitPlan& plan, double delta2,
                                           TrainingMode mode) {
    const int B = ch.cells(), K = ch.users();
    Matrix q = delta2 * identity(ch.rx());
    for (int s = 0; s < B; ++s)
        for (int i = 0; i < K; ++i) {
            if (s == b && i == k && mode == TrainingMode::interference_only) continue;
            const Matrix w = ch.H(b, k, s) * plan.F[s] * plan.directions[s * K + i];
            q += plan.powers[s * K + i] * (w * w.adjoint());
        }
    return 0.5 * (q + q.adjoint());
}

struct IAResidual {
    double residual = 0.0;
    bool desired_full_rank = false;
};

/// sum of ||U^H H F V||_F^2 over every interfering transmission at user k of
/// cell b, on the true channels with V = sqrt(P) V_dir.
inline IAResidual ia_residual(int k, int b, const Matrix& U, const ChannelSet& ch,
                              const TransmitPlan& plan) {
    const int B = ch.cells(), K = ch.users();
    IAResidual out;
    for (int s = 0; s < B; ++s)
        for (int i = 0; i < K; ++i) {
            const Matrix w = U.adjoint() * ch.H(b, k, s) * plan.F[s] * plan.directions[s * K + i];
            if (s == b && i == k) {
                const Eigen::JacobiSVD<Matrix> svd(w);
                const auto sv = svd.singularValues();
                const double tol = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
                out.desired_full_rank = sv.size() == U.cols() && (sv.array() > tol).all();
                continue;
            }
            out.residual += plan.powers[s * K + i] * w.squaredNorm();
        }
    return out;
}

} // namespace ria
