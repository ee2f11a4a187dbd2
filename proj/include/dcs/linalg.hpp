// Copyright 2026 The dcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Thin wrappers over the LAPACK drivers used for the dense non-Hermitian
// problems (full Liouvillian spectra and steady-state solves). Eigen's own
// ComplexEigenSolver is an order of magnitude slower at 4^N = 4096.

#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "dcs/errors.hpp"

extern "C" {
void zgeev_(const char *jobvl, const char *jobvr, const int *n, std::complex<double> *a,
            const int *lda, std::complex<double> *w, std::complex<double> *vl, const int *ldvl,
            std::complex<double> *vr, const int *ldvr, std::complex<double> *work,
            const int *lwork, double *rwork, int *info);
void zgesv_(const int *n, const int *nrhs, std::complex<double> *a, const int *lda, int *ipiv,
            std::complex<double> *b, const int *ldb, int *info);
}

namespace dcs::linalg {

struct EigenDecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // right eigenvectors as columns; empty if not requested
};

/// Eigenvalues (and optionally right eigenvectors) of a general complex matrix.
/// The matrix is taken by value because zgeev destroys its input.
inline EigenDecomposition eig(Eigen::MatrixXcd a, bool want_vectors = true) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != a.rows()) {
        throw InvalidArgument("eig: matrix is not square");
    }
    if (!a.allFinite()) {
        throw NumericalError("eig: matrix has non-finite entries");
    }
    EigenDecomposition out;
    out.values.resize(n);
    if (n == 0) {
        return out;
    }
    const char jobvl = 'N';
    const char jobvr = want_vectors ? 'V' : 'N';
    if (want_vectors) {
        out.vectors.resize(n, n);
    }
    std::complex<double> dummy;
    std::complex<double> *vr = want_vectors ? out.vectors.data() : &dummy;
    const int ldv = want_vectors ? n : 1;
    const int ldvl = 1;
    Eigen::VectorXd rwork(2 * n);
    int info = 0;

    int lwork = -1;
    std::complex<double> query;
    zgeev_(&jobvl, &jobvr, &n, a.data(), &n, out.values.data(), &dummy, &ldvl, vr, &ldv, &query,
           &lwork, rwork.data(), &info);
    lwork = static_cast<int>(query.real());
    Eigen::VectorXcd work(lwork);
    zgeev_(&jobvl, &jobvr, &n, a.data(), &n, out.values.data(), &dummy, &ldvl, vr, &ldv,
           work.data(), &lwork, rwork.data(), &info);
    if (info != 0) {
        throw NumericalError("zgeev failed to converge (info=" + std::to_string(info) + ")");
    }
    return out;
}

/// Solves a x = b by LU with partial pivoting.
inline Eigen::VectorXcd solve(Eigen::MatrixXcd a, Eigen::VectorXcd b) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != a.rows() || b.size() != n) {
        throw InvalidArgument("solve: dimension mismatch");
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw NumericalError("solve: non-finite entries");
    }
    Eigen::VectorXi ipiv(n);
    const int nrhs = 1;
    int info = 0;
    zgesv_(&n, &nrhs, a.data(), &n, ipiv.data(), b.data(), &n, &info);
    if (info > 0) {
        throw NumericalError("solve: matrix is singular");
    }
    if (info < 0) {
        throw InvalidArgument("solve: illegal argument " + std::to_string(-info));
    }
    return b;
}

}  // namespace dcs::linalg
