// SPDX-License-Identifier: Apache-2.0
//
// irsce: cascaded IRS channel estimation and training design
// Copyright (C) 2026 The irsce authors
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

#ifndef IRSCE_LINALG_HPP
#define IRSCE_LINALG_HPP

#include "irsce/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace irsce {

/// DFT matrix with entry (p,q) = exp(-j 2 pi p q / size), optionally scaled by 1/sqrt(size).
template <typename Real = double>
CMatrix<Real> dft_matrix(Index size, bool unitary)
{
    if (size < 1)
        throw InvalidInput("dft_matrix: size must be positive");
    CMatrix<Real> F(size, size);
    const Real scale = unitary ? Real(1) / std::sqrt(Real(size)) : Real(1);
    for (Index q = 0; q < size; ++q)
        for (Index p = 0; p < size; ++p)
        {
            // reduce the exponent mod size before the trig call to keep entries exact on the unit circle
            const Index e = (p * q) % size;
            const Real angle = -Real(2) * Real(EIGEN_PI) * Real(e) / Real(size);
            F(p, q) = std::polar(scale, angle);
        }
    return F;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived> &A, typename Derived::RealScalar tol)
{
    if (A.rows() != A.cols())
        return false;
    const auto scale = std::max(typename Derived::RealScalar(1), A.cwiseAbs().maxCoeff());
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

template <typename Real>
CMatrix<Real> hermitian_part(const CMatrix<Real> &A)
{
    return (A + A.adjoint()) * Real(0.5);
}

template <typename Real>
RVector<Real> hermitian_eigenvalues(const CMatrix<Real> &A)
{
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(hermitian_part(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Solves A X = B for Hermitian positive definite A.
///
/// `epsilon * I` is always added to A. When the Cholesky factorization
/// fails the solve is retried on A + delta I with delta scaled to the
/// diagonal, and a warning naming `what` is emitted.
template <typename Real, typename RhsDerived>
CMatrix<Real> solve_hermitian(const CMatrix<Real> &A, const Eigen::MatrixBase<RhsDerived> &B, Real epsilon,
                              std::string_view what)
{
    if (A.rows() != A.cols() || A.rows() != B.rows())
        throw InvalidInput(std::string(what) + ": shape mismatch in Hermitian solve");
    const Index n = A.rows();
    CMatrix<Real> work = hermitian_part(A);
    if (epsilon > Real(0))
        work.diagonal().array() += epsilon;

    Eigen::LLT<CMatrix<Real>> llt(work);
    if (llt.info() == Eigen::Success)
    {
        CMatrix<Real> x = llt.solve(B);
        if (x.allFinite())
            return x;
    }

    const Real diag_scale = std::max(work.diagonal().real().cwiseAbs().maxCoeff(), std::numeric_limits<Real>::min());
    Real delta = std::max(epsilon, diag_scale * Real(1e-12));
    for (int attempt = 0; attempt < 8; ++attempt, delta *= Real(100))
    {
        CMatrix<Real> reg = work;
        reg.diagonal().array() += delta;
        Eigen::LDLT<CMatrix<Real>> ldlt(reg);
        if (ldlt.info() != Eigen::Success)
            continue;
        CMatrix<Real> x = ldlt.solve(B);
        if (!x.allFinite())
            continue;
        std::ostringstream os;
        os << what << ": system of size " << n << " not positive definite, solved with diagonal loading " << delta;
        warn(os.str());
        return x;
    }
    throw SolverError(std::string(what) + ": singular system");
}

/// Inverse of a Hermitian positive definite matrix; throws SolverError if A is not PD.
template <typename Real>
CMatrix<Real> hermitian_inverse(const CMatrix<Real> &A)
{
    Eigen::LLT<CMatrix<Real>> llt(hermitian_part(A));
    if (llt.info() != Eigen::Success)
        throw SolverError("hermitian_inverse: matrix is not positive definite");
    CMatrix<Real> inv = llt.solve(CMatrix<Real>::Identity(A.rows(), A.cols()));
    return hermitian_part(inv);
}

/// Solves X A = B for square A (right division), as used by LS channel reconstruction.
template <typename Real>
CMatrix<Real> right_divide(const CMatrix<Real> &B, const CMatrix<Real> &A, std::string_view what)
{
    if (A.rows() != A.cols() || B.cols() != A.rows())
        throw InvalidInput(std::string(what) + ": shape mismatch");
    Eigen::FullPivLU<CMatrix<Real>> lu(A);
    if (!lu.isInvertible())
        throw SolverError(std::string(what) + ": singular matrix");
    // X A = B  <=>  A^T X^T = B^T
    Eigen::FullPivLU<CMatrix<Real>> lut(A.transpose());
    return lut.solve(B.transpose()).transpose();
}

} // namespace irsce

#endif // IRSCE_LINALG_HPP
