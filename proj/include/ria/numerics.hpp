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

// Dense complex linear algebra used throughout the library, plus the
// brute-force reference routines (eigendecomposition, SVD, subspace distance)
// that the iterative trackers are checked against.

#include "ria/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace ria {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double pi = 3.14159265358979323846;

struct EigenDecomposition {
    RealVector values; // ascending
    Matrix vectors;    // column i pairs with values[i]
};

struct CompactSVD {
    Matrix left;
    RealVector singulars;
    Matrix right;
};

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

/// Real part of tr(A^H B), the real inner product on complex matrices.
inline double inner(const Matrix& a, const Matrix& b) {
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

inline double hermitian_asymmetry(const Matrix& a) {
    return (a - a.adjoint()).norm();
}

inline EigenDecomposition hermitian_eig(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError("hermitian_eig: matrix must be square and nonempty");
    if (!all_finite(a))
        throw NonFinite("hermitian_eig: non-finite entry");
    const double scale = std::max(1.0, a.norm());
    if (hermitian_asymmetry(a) > 1e-10 * scale)
        throw NotHermitian("hermitian_eig: asymmetry exceeds tolerance");

    // Symmetrize so the solver sees an exactly Hermitian input.
    const Matrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw SolverFailure("hermitian_eig: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Eigenvectors of the m smallest eigenvalues.
inline Matrix minor_subspace(const Matrix& a, Index m) {
    if (m < 1 || m > a.rows())
        throw DimensionError("minor_subspace: m out of range");
    return hermitian_eig(a).vectors.leftCols(m);
}

/// Eigenvectors of the m largest eigenvalues, strongest first.
inline Matrix principal_subspace(const Matrix& a, Index m) {
    if (m < 1 || m > a.rows())
        throw DimensionError("principal_subspace: m out of range");
    return hermitian_eig(a).vectors.rightCols(m).rowwise().reverse();
}

// Modified Gram-Schmidt with one reorthogonalization pass.
inline Matrix orthonormalize(const Matrix& t) {
    if (!all_finite(t)) throw NonFinite("orthonormalize: non-finite entry");
    const double tol = 1e-12 * t.norm();
    Matrix q = t;
    for (Index j = 0; j < q.cols(); ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Index i = 0; i < j; ++i) {
                const cplx r = q.col(i).dot(q.col(j));
                q.col(j) -= r * q.col(i);
            }
        }
        const double nrm = q.col(j).norm();
        if (!(nrm > tol) || nrm == 0.0)
            throw RankDeficient("orthonormalize: pivot norm below tolerance");
        q.col(j) /= nrm;
    }
    return q;
}

/// ||U1 U1^H - U2 U2^H||_F / sqrt(2); zero iff the spans coincide.
inline double subspace_distance(const Matrix& u1, const Matrix& u2) {
    if (u1.rows() != u2.rows() || u1.cols() != u2.cols())
        throw DimensionError("subspace_distance: shape mismatch");
    const Matrix p = u1 * u1.adjoint() - u2 * u2.adjoint();
    return p.norm() / std::sqrt(2.0);
}

inline CompactSVD compact_svd(const Matrix& t) {
    if (!all_finite(t)) throw NonFinite("compact_svd: non-finite entry");
    Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline double orthonormality_error(const Matrix& q) {
    return (q.adjoint() * q - identity(q.cols())).norm();
}

/// Bessel function J0 by Miller's backward recurrence, normalized with
/// J0 + 2 * sum J_2k = 1.
inline double bessel_j0(double x) {
    if (!std::isfinite(x)) throw NonFinite("bessel_j0: non-finite argument");
    const double ax = std::abs(x);
    if (ax < 1e-300) return 1.0;
    if (ax < 1e-4) {
        const double h = 0.25 * ax * ax;
        return 1.0 - h + 0.25 * h * h;
    }

    int n = static_cast<int>(ax + 30.0 + 8.0 * std::sqrt(ax));
    n += n % 2; // start on an even order
    double next = 0.0;
    double cur = 1.0;
    double norm = 2.0; // J_n itself carries weight 2
    for (int k = n; k > 0; --k) {
        const double prev = 2.0 * k / ax * cur - next;
        next = cur;
        cur = prev; // cur now holds J_{k-1} (unnormalized)
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    return cur / norm;
}

} // namespace ria
