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

// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.

#include "ria/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using ria::cplx;
using ria::Index;
using ria::Matrix;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi on its real 2n x 2n
/// embedding [[Re, -Im], [Im, Re]], whose spectrum is that of A doubled.
inline std::vector<double> hermitian_eigenvalues(const Matrix& a) {
    const Index n = a.rows();
    const Index m = 2 * n;
    std::vector<double> s(m * m);
    auto at = [&](Index i, Index j) -> double& { return s[i * m + j]; };
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const cplx z = 0.5 * (a(i, j) + std::conj(a(j, i)));
            at(i, j) = z.real();
            at(i + n, j + n) = z.real();
            at(i, j + n) = -z.imag();
            at(i + n, j) = z.imag();
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j)
                if (i != j) off += at(i, j) * at(i, j);
        if (off < 1e-26) break;
        for (Index p = 0; p < m; ++p)
            for (Index q = p + 1; q < m; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (Index k = 0; k < m; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - sn * akq;
                    at(k, q) = sn * akp + c * akq;
                }
                for (Index k = 0; k < m; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - sn * aqk;
                    at(q, k) = sn * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(m);
    for (Index i = 0; i < m; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    std::vector<double> out(n);
    for (Index i = 0; i < n; ++i) out[i] = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
    return out;
}

inline double sum_smallest(const Matrix& a, Index m) {
    const auto ev = hermitian_eigenvalues(a);
    double s = 0.0;
    for (Index i = 0; i < m; ++i) s += ev[i];
    return s;
}

/// Classical Gram-Schmidt QR, written independently of the library.
inline Matrix qr_q(const Matrix& t) {
    Matrix q = t;
    for (Index j = 0; j < t.cols(); ++j) {
        for (Index i = 0; i < j; ++i) {
            cplx r = 0;
            for (Index k = 0; k < t.rows(); ++k) r += std::conj(q(k, i)) * q(k, j);
            for (Index k = 0; k < t.rows(); ++k) q(k, j) -= r * q(k, i);
        }
        double nrm = 0;
        for (Index k = 0; k < t.rows(); ++k) nrm += std::norm(q(k, j));
        nrm = std::sqrt(nrm);
        for (Index k = 0; k < t.rows(); ++k) q(k, j) /= nrm;
    }
    return q;
}

inline Matrix projector(const Matrix& u) { return u * u.adjoint(); }

/// J0 by its power series in long double.
inline double bessel_j0_series(double x) {
    long double term = 1.0L, sum = 1.0L;
    const long double q = 0.25L * x * x;
    for (int k = 1; k < 400; ++k) {
        term *= -q / (static_cast<long double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-30L) break;
    }
    return static_cast<double>(sum);
}

/// J0(x) = (1/pi) int_0^pi cos(x sin t) dt by the trapezoidal rule, which
/// converges geometrically for this periodic integrand.
inline double bessel_j0_integral(double x) {
    const int n = 400;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::cos(x * std::sin(ria::pi * (i + 0.5) / n));
    return sum / n;
}

inline Matrix random_complex(Index r, Index c, std::mt19937_64& g) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    Matrix a(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) a(i, j) = {n(g), n(g)};
    return a;
}

inline Matrix random_hermitian(Index n, std::mt19937_64& g) {
    const Matrix x = random_complex(2 * n, n, g);
    return x.adjoint() * x;
}

inline Matrix random_orthonormal(Index r, Index c, std::mt19937_64& g) {
    return qr_q(random_complex(r, c, g));
}

} // namespace oracle
