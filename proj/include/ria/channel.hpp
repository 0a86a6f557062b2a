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

// Time-varying Rayleigh channels for the B-cell network: Gauss-Markov
// evolution with a Doppler-driven correlation coefficient, and the split of
// every true channel into a transmitter-side estimate plus an error term.

#include "ria/network_config.hpp"
#include "ria/numerics.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ria {

inline constexpr double speed_of_light = 2.99792458e8;

/// Seeded source of circularly-symmetric complex Gaussian samples.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }

    /// CN(0, variance): real and imaginary parts each N(0, variance / 2).
    cplx cn(double variance) {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    Matrix cn_matrix(Index rows, Index cols, double variance = 1.0) {
        Matrix a(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) a(i, j) = cn(variance);
        return a;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// splitmix64 finalizer, used to derive independent per-drop seeds.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Channel entries live on a 2^-40 fixed-point grid. Sums and differences of
// grid values below 2^13 in magnitude are exact in double precision, so
// H = H_hat + Delta_H holds bit-for-bit in both directions.
inline constexpr int channel_grid_exponent = 40;

inline double quantize(double x) {
    return std::ldexp(std::nearbyint(std::ldexp(x, channel_grid_exponent)),
                      -channel_grid_exponent);
}

inline Matrix quantize(const Matrix& a) {
    Matrix q(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            q(i, j) = {quantize(a(i, j).real()), quantize(a(i, j).imag())};
    return q;
}

/// True, estimated and error channels for every (serving cell, user, source
/// BS) triple. H(b, k, s) is the N x M channel from BS s to user k of cell b.
class ChannelSet {
public:
    ChannelSet() = default;
    ChannelSet(int cells, int users, int rx, int tx)
        : B_(cells), K_(users), N_(rx), M_(tx),
          true_(count()), hat_(count()), err_(count()) {}

    int cells() const { return B_; }
    int users() const { return K_; }
    int rx() const { return N_; }
    int tx() const { return M_; }
    std::size_t count() const { return static_cast<std::size_t>(B_) * K_ * B_; }

    std::size_t index(int b, int k, int s) const {
        return (static_cast<std::size_t>(b) * K_ + k) * B_ + s;
    }

    const Matrix& H(int b, int k, int s) const { return true_[index(b, k, s)]; }
    const Matrix& H_hat(int b, int k, int s) const { return hat_[index(b, k, s)]; }
    const Matrix& Delta_H(int b, int k, int s) const { return err_[index(b, k, s)]; }

    Matrix& H(int b, int k, int s) { return true_[index(b, k, s)]; }
    Matrix& H_hat(int b, int k, int s) { return hat_[index(b, k, s)]; }
    Matrix& Delta_H(int b, int k, int s) { return err_[index(b, k, s)]; }

    bool operator==(const ChannelSet&) const = default;

private:
    int B_ = 0, K_ = 0, N_ = 0, M_ = 0;
    std::vector<Matrix> true_, hat_, err_;
};

/// Correlation coefficient J0(2*pi*Omega*f_d), f_d = v * f_c / c.
inline double doppler_alpha(double v, double f_c, double omega) {
    if (!std::isfinite(v) || !std::isfinite(f_c) || !std::isfinite(omega))
        throw NonFinite("doppler_alpha: non-finite input");
    if (v < 0 || f_c < 0 || omega < 0)
        throw ValidationError("doppler_alpha: inputs must be >= 0");
    const double f_d = v * f_c / speed_of_light;
    return bessel_j0(2.0 * pi * omega * f_d);
}

/// Splits a true channel into estimate and error with the error drawn
/// CN(0, entry_variance) per entry and uncorrelated with the estimate:
/// Delta = s2 * H + sqrt(s2 (1 - s2)) * Z, H_hat = H - Delta.
/// The random draws are consumed even when entry_variance is zero.
inline std::pair<Matrix, Matrix> split_estimate(const Matrix& h_true, double entry_variance,
                                                Rng& rng) {
    if (entry_variance < 0 || entry_variance > 1)
        throw ValidationError("split_estimate: entry variance must lie in [0, 1]");
    const Matrix z = rng.cn_matrix(h_true.rows(), h_true.cols());
    const double s2 = entry_variance;
    Matrix err = quantize((s2 * h_true + std::sqrt(s2 * (1.0 - s2)) * z).eval());
    Matrix hat = h_true - err;
    return {std::move(hat), std::move(err)};
}

inline void resplit(ChannelSet& ch, double entry_variance, Rng& rng) {
    for (int b = 0; b < ch.cells(); ++b)
        for (int k = 0; k < ch.users(); ++k)
            for (int s = 0; s < ch.cells(); ++s) {
                auto [hat, err] = split_estimate(ch.H(b, k, s), entry_variance, rng);
                ch.H_hat(b, k, s) = std::move(hat);
                ch.Delta_H(b, k, s) = std::move(err);
            }
}

inline ChannelSet draw_channels(const NetworkConfig& cfg, Rng& rng) {
    ChannelSet ch(cfg.B, cfg.K, cfg.N, cfg.M);
    for (int b = 0; b < cfg.B; ++b)
        for (int k = 0; k < cfg.K; ++k)
            for (int s = 0; s < cfg.B; ++s)
                ch.H(b, k, s) = quantize(rng.cn_matrix(cfg.N, cfg.M));
    resplit(ch, cfg.error_entry_variance(), rng);
    return ch;
}

/// One Gauss-Markov step H(t) = alpha H(t-1) + sqrt(1 - alpha^2) G(t),
/// followed by a fresh estimate split of the new truth.
inline ChannelSet evolve(const ChannelSet& prev, double alpha, double entry_variance,
                         Rng& rng) {
    if (std::abs(alpha) > 1.0) throw ValidationError("evolve: |alpha| must be <= 1");
    ChannelSet next = prev;
    const double innov = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    for (int b = 0; b < prev.cells(); ++b)
        for (int k = 0; k < prev.users(); ++k)
            for (int s = 0; s < prev.cells(); ++s) {
                const Matrix g = rng.cn_matrix(prev.rx(), prev.tx());
                next.H(b, k, s) = quantize((alpha * prev.H(b, k, s) + innov * g).eval());
            }
    resplit(next, entry_variance, rng);
    return next;
}

} // namespace ria
