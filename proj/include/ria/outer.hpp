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

// Outer beamformer: minimizes tr(F^H Phi F) over orthonormal M x m frames by
// conjugate gradients along Grassmann geodesics, with a set-membership gate
// that skips the solve while the interference covariance barely moves.

#include "ria/channel.hpp"
#include "ria/network_config.hpp"
#include "ria/numerics.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace ria {

/// sum_{c != b} sum_i H_hat_{ic}^{b H} H_hat_{ic}^{b} + coeff * delta_e^2 I, with
/// coeff = (B-1) K (term_count) or B K - 1 (printed).
inline Matrix interference_covariance(const ChannelSet& ch, int b, double delta_e,
                                      PhiErrorCoeff coeff = PhiErrorCoeff::term_count) {
    const int B = ch.cells(), K = ch.users();
    Matrix phi = Matrix::Zero(ch.tx(), ch.tx());
    for (int c = 0; c < B; ++c) {
        if (c == b) continue;
        for (int i = 0; i < K; ++i) phi += ch.H_hat(c, i, b).adjoint() * ch.H_hat(c, i, b);
    }
    if (B > 1) {
        const double n = coeff == PhiErrorCoeff::term_count ? (B - 1.0) * K : B * K - 1.0;
        phi.diagonal().array() += n * delta_e * delta_e;
    }
    return 0.5 * (phi + phi.adjoint());
}

inline double rayleigh_quotient(const Matrix& F, const Matrix& phi) {
    return (F.adjoint() * phi * F).trace().real();
}

inline Matrix euclidean_gradient(const Matrix& F, const Matrix& phi) { return 2.0 * phi * F; }

/// (I - F F^H) 2 Phi F.
inline Matrix horizontal_gradient(const Matrix& F, const Matrix& phi) {
    const Matrix g = euclidean_gradient(F, phi);
    return g - F * (F.adjoint() * g);
}

inline Matrix horizontal_part(const Matrix& F, const Matrix& t) { return t - F * (F.adjoint() * t); }

/// F(tau) = F R cos(S tau) R^H + L sin(S tau) R^H for direction L S R^H.
inline Matrix geodesic(const Matrix& F, const CompactSVD& dir, double tau) {
    const Index r = dir.singulars.size();
    Matrix c = Matrix::Zero(r, r), s = Matrix::Zero(r, r);
    for (Index i = 0; i < r; ++i) {
        c(i, i) = std::cos(dir.singulars(i) * tau);
        s(i, i) = std::sin(dir.singulars(i) * tau);
    }
    const Matrix rh = dir.right.adjoint();
    // F (I - R R^H) keeps the part of F the direction does not rotate.
    return F + F * dir.right * (c - identity(r)) * rh + dir.left * s * rh;
}

struct Transported {
    Matrix Theta;
    Matrix Xi;
};

/// Parallel transport of the search direction and a tangent Xi along the
/// geodesic to F(tau).
inline Transported transport(const Matrix& F, const CompactSVD& dir, const Matrix& xi, double tau) {
    const Index r = dir.singulars.size();
    Matrix c = Matrix::Zero(r, r), s = Matrix::Zero(r, r), sig = Matrix::Zero(r, r);
    for (Index i = 0; i < r; ++i) {
        c(i, i) = std::cos(dir.singulars(i) * tau);
        s(i, i) = std::sin(dir.singulars(i) * tau);
        sig(i, i) = dir.singulars(i);
    }
    const Matrix rh = dir.right.adjoint();
    Transported out;
    out.Theta = (-F * dir.right * s + dir.left * c) * sig * rh;
    out.Xi = xi - (F * dir.right * s + dir.left * (identity(r) - c)) * (dir.left.adjoint() * xi);
    return out;
}

/// Polak-Ribiere weight tr((Xi_new - Xi_t)^H Xi_new) / tr(Xi_old^H Xi_old).
inline double polak_ribiere(const Matrix& xi_new, const Matrix& xi_translated, const Matrix& xi_old) {
    const double den = xi_old.squaredNorm();
    if (!(den > 0)) return 0.0;
    return inner(xi_new - xi_translated, xi_new) / den;
}

/// Next search direction -Xi_new + w Theta_t, restarted at -Xi_new when it
/// fails to be a descent direction.
inline Matrix conjugate_direction(const Matrix& xi_new, const Matrix& xi_translated,
                                  const Matrix& theta_translated, const Matrix& xi_old) {
    const double w = polak_ribiere(xi_new, xi_translated, xi_old);
    Matrix theta = -xi_new + w * theta_translated;
    if (inner(xi_new, theta) >= 0) theta = -xi_new;
    return theta;
}

struct ArmijoOptions {
    double kappa = 0.1;
    double nu = 2.0;
    double tau0 = 1.0;
    int max_halvings = 60;
    int max_doublings = 60;
};

struct ArmijoResult {
    double tau = 0.0;
    bool failed = false;
};

/// Backtracking-Armijo step on the geodesic, followed by expansion while the
/// doubled step still satisfies the sufficient-decrease test.
inline ArmijoResult armijo_tau(const Matrix& F, const Matrix& theta, const Matrix& phi,
                               const ArmijoOptions& opt = {}) {
    ArmijoResult out{opt.tau0, false};
    if (theta.norm() == 0.0) return out;
    const double slope = inner(euclidean_gradient(F, phi), theta);
    if (!(slope < 0)) {
        out.tau = 0.0;
        out.failed = true;
        return out;
    }
    const CompactSVD dir = compact_svd(theta);
    const double j0 = rayleigh_quotient(F, phi);
    auto accepted = [&](double tau) {
        return rayleigh_quotient(geodesic(F, dir, tau), phi) <= j0 + opt.kappa * tau * slope;
    };

    double tau = opt.tau0;
    if (!accepted(tau)) {
        for (int i = 0; i < opt.max_halvings; ++i) {
            tau /= opt.nu;
            if (accepted(tau)) {
                out.tau = tau;
                return out;
            }
        }
        out.tau = 0.0;
        out.failed = true;
        return out;
    }
    for (int i = 0; i < opt.max_doublings && accepted(opt.nu * tau); ++i) tau *= opt.nu;
    out.tau = tau;
    return out;
}

struct GrassmannState {
    Matrix F;
    Matrix Theta;
    Matrix Xi_prev;
    double tau = 0.0;
    double J = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    std::vector<double> J_trace;
};

struct CggmOptions {
    int max_iter = 200;
    double tol = 1e-6;
    double grad_tol = 1e-3;
    ArmijoOptions armijo;
    double max_orthonormality_error = 0.0; // out: worst seen, if tracked
};

inline CggmOptions cggm_options(const NetworkConfig& c) {
    CggmOptions o;
    o.max_iter = c.cggm_max_iter;
    o.tol = c.cggm_tol;
    o.grad_tol = c.cggm_grad_tol;
    o.armijo.kappa = c.armijo_kappa;
    o.armijo.nu = c.armijo_nu;
    o.armijo.tau0 = c.armijo_tau0;
    return o;
}

/// Conjugate-gradient descent of tr(F^H Phi F) on the Grassmann manifold.
/// The optional hook sees every iterate, for stability checks.
template <class Hook>
GrassmannState cggm(const Matrix& phi, const Matrix& F0, const CggmOptions& opt, Hook&& hook) {
    if (phi.rows() != phi.cols() || F0.rows() != phi.rows())
        throw DimensionError("cggm: shape mismatch");
    GrassmannState st;
    st.F = F0;
    st.J = rayleigh_quotient(st.F, phi);
    st.J_trace.push_back(st.J);
    Matrix xi = horizontal_gradient(st.F, phi);
    Matrix theta = -xi;

    for (int it = 1; it <= opt.max_iter; ++it) {
        st.iterations = it;
        const double gnorm = xi.norm();
        const double egrad = euclidean_gradient(st.F, phi).norm();
        if (gnorm == 0.0 || gnorm <= 1e-8 * egrad) {
            st.converged = true;
            break;
        }
        theta = horizontal_part(st.F, theta);
        if (inner(xi, theta) >= 0) theta = -xi;

        ArmijoResult step = armijo_tau(st.F, theta, phi, opt.armijo);
        if (step.failed && (theta + xi).norm() > 0) {
            theta = -xi;
            step = armijo_tau(st.F, theta, phi, opt.armijo);
        }
        if (step.failed) {
            st.line_search_failed = true;
            break;
        }
        const CompactSVD dir = compact_svd(theta);
        const Matrix F_new = geodesic(st.F, dir, step.tau);
        hook(F_new);
        const double J_new = rayleigh_quotient(F_new, phi);
        const Matrix xi_new = horizontal_gradient(F_new, phi);
        const Transported tr = transport(st.F, dir, xi, step.tau);
        const Matrix theta_new = conjugate_direction(xi_new, tr.Xi, tr.Theta, xi);

        const double rel = std::abs(st.J - J_new) / std::max(std::abs(J_new), 1.0);
        st.F = F_new;
        st.J = J_new;
        st.tau = step.tau;
        st.Xi_prev = xi;
        xi = xi_new;
        theta = theta_new;
        st.J_trace.push_back(st.J);

        const double ratio = xi.norm() / std::max(euclidean_gradient(st.F, phi).norm(), 1e-300);
        if (rel < opt.tol && ratio <= opt.grad_tol) {
            st.converged = true;
            break;
        }
    }
    st.Theta = theta;
    return st;
}

inline GrassmannState cggm(const Matrix& phi, const Matrix& F0, const CggmOptions& opt = {}) {
    return cggm(phi, F0, opt, [](const Matrix&) {});
}

/// Random orthonormal M x m starting frame.
inline Matrix random_frame(Index M, Index m, Rng& rng) {
    return orthonormalize(rng.cn_matrix(M, m));
}

struct SMGateState {
    Matrix Phi_prev;
    Matrix F_prev;
    double eta = 0.05;
    std::optional<double> Pi; // fixed threshold overriding eta
    bool initialized = false;
    int update_count = 0;
    int hold_count = 0;

    double threshold() const { return Pi ? *Pi : eta * Phi_prev.squaredNorm(); }
};

struct SMStep {
    Matrix F;
    bool updated = false;
    double deviation = 0.0;
};

/// Runs cggm from F_prev when ||Phi_t - Phi_prev||_F^2 >= threshold, else
/// keeps F_prev. The first call always updates from F_init.
inline SMStep sm_update(const Matrix& phi, SMGateState& gate, const CggmOptions& opt,
                        const Matrix& F_init) {
    SMStep out;
    if (!gate.initialized) {
        out.deviation = std::numeric_limits<double>::infinity();
        out.updated = true;
        gate.F_prev = F_init;
    } else {
        out.deviation = (phi - gate.Phi_prev).squaredNorm();
        out.updated = out.deviation >= gate.threshold();
    }
    if (out.updated) {
        gate.F_prev = cggm(phi, gate.F_prev, opt).F;
        gate.Phi_prev = phi;
        gate.initialized = true;
        ++gate.update_count;
    } else {
        ++gate.hold_count;
    }
    out.F = gate.F_prev;
    return out;
}

} // namespace ria
