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

#include "ria/error.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace ria {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double kmh_to_ms(double kmh) { return kmh / 3.6; }

enum class ErrorNormalization { per_entry, gram_identity };
enum class PhiErrorCoeff { term_count, printed };
enum class StepNorm { x2, x1 };
enum class TrainingMode { interference_only, full };
enum class ReceiverInit { carry, reset };
enum class Baseline { none, nonrobust, oracle };

/// Scenario constants. Powers are stored in watts, speed in m/s.
struct NetworkConfig {
    int B = 3;      // cells
    int K = 4;      // users per cell
    int M = 8;      // BS transmit antennas
    int N = 2;      // user receive antennas
    int d = 1;      // streams per user
    int m_b = 4;    // inner dimension per cell

    double P_T = dbm_to_watt(42.0);
    double gamma_bar = 0.1;  // minimum SLNR target (linear)
    double delta2 = 1.0;     // noise power
    double delta_e = 0.05;   // channel-error standard deviation
    double rho = 0.39;
    double P_c = dbm_to_watt(30.0);
    double P_o = dbm_to_watt(40.0);

    double v = kmh_to_ms(5.0);
    double f_c = 2e9;
    double Omega = 66.7e-6;
    int T = 10;

    // energy-efficient power allocation
    int L_max = 20;
    double zeta = 1e-2;

    // inner beamformer multiplier iteration
    int inner_max_sweeps = 100;
    double inner_tol = 1e-4;

    // outer beamformer
    int cggm_max_iter = 200;
    double cggm_tol = 1e-6;
    double cggm_grad_tol = 1e-3;
    double armijo_kappa = 0.1;
    double armijo_nu = 2.0;
    double armijo_tau0 = 1.0;
    double eta = 0.05; // gate threshold as a fraction of ||Phi_prev||_F^2

    // receive tracker
    int T_train = 500;
    double alpha0 = -0.05;

    std::uint64_t seed = 1;

    ErrorNormalization error_normalization = ErrorNormalization::gram_identity;
    PhiErrorCoeff phi_error_coeff = PhiErrorCoeff::term_count;
    StepNorm step_norm = StepNorm::x2;
    TrainingMode training_mode = TrainingMode::interference_only;
    ReceiverInit receiver_init = ReceiverInit::carry;
    Baseline baseline = Baseline::none;

    /// Per-entry variance of the channel estimation error.
    double error_entry_variance() const {
        const double s2 = delta_e * delta_e;
        return error_normalization == ErrorNormalization::gram_identity ? s2 / N : s2;
    }

    bool operator==(const NetworkConfig&) const = default;
};

inline void validate(const NetworkConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(what);
    };
    require(c.B >= 1 && c.K >= 1 && c.M >= 1 && c.N >= 1 && c.d >= 1,
            "B, K, M, N, d must all be >= 1");
    require(c.m_b >= c.K * c.d, "m_b >= K*d (inner multiplexing feasibility)");
    require(c.m_b <= c.M, "m_b <= M");
    require(c.N >= c.d, "N >= d");
    require(c.P_T >= 0 && c.P_c >= 0 && c.P_o >= 0 && c.rho >= 0,
            "powers and rho must be >= 0");
    require(c.delta2 > 0, "delta2 > 0");
    require(c.delta_e >= 0, "delta_e >= 0");
    require(c.error_entry_variance() <= 1.0, "per-entry error variance <= 1");
    require(c.gamma_bar > 0, "gamma_bar > 0");
    require(c.v >= 0 && c.f_c >= 0 && c.Omega >= 0, "v, f_c, Omega >= 0");
    require(c.T >= 1, "T >= 1");
    require(c.L_max >= 1 && c.zeta > 0, "L_max >= 1 and zeta > 0");
    require(c.inner_max_sweeps >= 1 && c.inner_tol > 0, "inner iteration limits");
    require(c.cggm_max_iter >= 1 && c.cggm_tol > 0 && c.cggm_grad_tol > 0,
            "cggm iteration limits");
    require(c.armijo_kappa > 0 && c.armijo_kappa < 0.5, "armijo_kappa in (0, 0.5)");
    require(c.armijo_nu > 1, "armijo_nu > 1");
    require(c.armijo_tau0 > 0, "armijo_tau0 > 0");
    require(c.eta >= 0, "eta >= 0");
    require(c.T_train >= 0, "T_train >= 0");
    require(c.alpha0 < 0, "alpha0 < 0 (minor subspace tracking)");
}

} // namespace ria
