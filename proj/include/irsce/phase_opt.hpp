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

#ifndef IRSCE_PHASE_OPT_HPP
#define IRSCE_PHASE_OPT_HPP

// Steering-direction design for the stage-I phase shifts.
//
// With theta_l = diag(vartheta) f_l, the average reflected power collected in
// stage I is vartheta^H E vartheta where
//   E = sum_{l<=L1} sum_k sum_m diag(f_l)^H conj(C_m^(k)) diag(f_l).
// It is maximized over |vartheta_n| = 1 by successive linearization, whose
// per-step maximizer is vartheta = exp(j angle(E vartheta_prev)).

#include "irsce/linalg.hpp"
#include "irsce/model.hpp"
#include "irsce/types.hpp"

#include <vector>

namespace irsce {

/// E assembled from the cascaded covariances and the first L1 columns of F.
template <typename Real>
CMatrix<Real> build_gain_matrix(const CovarianceSet<Real> &cov, const CMatrix<Real> &F, Index L1)
{
    const Index N = cov.N;
    if (F.rows() != N || F.cols() < L1 || L1 < 1)
        throw InvalidInput("build_gain_matrix: F must be N x N and 1 <= L1 <= N");
    if (Index(cov.cascaded_.size()) != cov.M * cov.K || cov.cascaded_.empty())
        throw InvalidInput("build_gain_matrix: missing cascaded covariances");

    CMatrix<Real> S = CMatrix<Real>::Zero(N, N);
    for (const auto &C : cov.cascaded_)
    {
        if (C.rows() != N || C.cols() != N)
            throw InvalidInput("build_gain_matrix: covariance must be N x N");
        S += C;
    }
    const CMatrix<Real> Sconj = S.conjugate();
    CMatrix<Real> E = CMatrix<Real>::Zero(N, N);
    for (Index l = 0; l < L1; ++l)
        E += (F.col(l).conjugate() * F.col(l).transpose()).cwiseProduct(Sconj);
    return hermitian_part(E);
}

/// vartheta^H E vartheta (real part; E Hermitian).
template <typename Real>
Real eval_fB(const CVector<Real> &vartheta, const CMatrix<Real> &E)
{
    if (E.rows() != vartheta.size() || E.cols() != vartheta.size())
        throw InvalidInput("eval_fB: shape mismatch");
    return (vartheta.adjoint() * E * vartheta)(0, 0).real();
}

/// Linearized objective 2 Re{vbar^H E v} - vbar^H E vbar; tangent to f_B at vbar.
template <typename Real>
Real surrogate_fB(const CVector<Real> &vartheta, const CVector<Real> &anchor, const CMatrix<Real> &E)
{
    return Real(2) * (anchor.adjoint() * E * vartheta)(0, 0).real() - eval_fB(anchor, E);
}

/// One successive-linearization step: exp(j angle(E vbar)); zero entries keep the previous phase.
template <typename Real>
CVector<Real> sca_step(const CVector<Real> &anchor, const CMatrix<Real> &E)
{
    const CVector<Real> g = E * anchor;
    const Real scale = g.cwiseAbs().maxCoeff();
    CVector<Real> out(anchor.size());
    for (Index n = 0; n < anchor.size(); ++n)
    {
        const Real mag = std::abs(g(n));
        if (!(mag > std::numeric_limits<Real>::epsilon() * scale) || mag == Real(0))
            out(n) = std::polar(Real(1), std::arg(anchor(n)));
        else
            out(n) = g(n) / mag;
    }
    return out;
}

template <typename Real = double>
struct SteeringResult
{
    CVector<Real> vartheta;
    std::vector<Real> trajectory; ///< f_B at the initial point, then after each step
    int iterations = 0;
};

/// Iterates sca_step from `init` until the relative change of f_B is below `tol` or `max_iters` steps.
template <typename Real>
SteeringResult<Real> optimize_steering(const CMatrix<Real> &E, const CVector<Real> &init, Real tol = Real(1e-8),
                                       int max_iters = 200)
{
    if (E.rows() != E.cols() || E.rows() != init.size())
        throw InvalidInput("optimize_steering: E must be N x N and init of length N");
    if (!is_unit_modulus(init, Real(1e-9)))
        throw InvalidInput("optimize_steering: init must have unit-modulus entries");
    SteeringResult<Real> r;
    r.vartheta = init;
    r.trajectory.push_back(eval_fB(init, E));
    for (int it = 1; it <= max_iters; ++it)
    {
        r.vartheta = sca_step(r.vartheta, E);
        const Real f = eval_fB(r.vartheta, E);
        const Real prev = r.trajectory.back();
        r.trajectory.push_back(f);
        r.iterations = it;
        if (std::abs(f - prev) <= tol * std::max(std::abs(f), std::numeric_limits<Real>::min()))
            break;
    }
    return r;
}

/// Unit-modulus projection of the dominant eigenvector of E.
template <typename Real>
CVector<Real> principal_phase_start(const CMatrix<Real> &E)
{
    if (E.rows() != E.cols() || E.rows() == 0)
        throw InvalidInput("principal_phase_start: E must be square and nonempty");
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(hermitian_part(E));
    if (es.info() != Eigen::Success)
        throw SolverError("principal_phase_start: eigendecomposition failed");
    const CVector<Real> v = es.eigenvectors().col(E.rows() - 1);
    CVector<Real> out(v.size());
    for (Index n = 0; n < v.size(); ++n)
        out(n) = std::abs(v(n)) > Real(0) ? v(n) / std::abs(v(n)) : Complex<Real>(1);
    return out;
}

/// Starts from principal_phase_start(E).
template <typename Real>
SteeringResult<Real> optimize_steering(const CMatrix<Real> &E, Real tol = Real(1e-8), int max_iters = 200)
{
    return optimize_steering<Real>(E, principal_phase_start(E), tol, max_iters);
}

} // namespace irsce

#endif // IRSCE_PHASE_OPT_HPP
