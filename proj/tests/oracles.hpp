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

#ifndef IRSCE_TESTS_ORACLES_HPP
#define IRSCE_TESTS_ORACLES_HPP

#include "irsce/map_estimator.hpp"
#include "irsce/phase_opt.hpp"

#include <functional>
#include <vector>

namespace irsce::test {

/// f_A summed entry by entry.
inline double objective_oracle(const MapProblem<double> &p, const CMatrix<double> &Hg, const CMatrix<double> &Hu)
{
    const Index M = p.dims.M, N = p.dims.N, K = p.dims.K, L1 = p.dims.L1();
    double f = 0;
    for (Index l = 1; l <= L1; ++l)
        for (Index m = 0; m < M; ++m)
            for (Index k = 0; k < K; ++k)
            {
                std::complex<double> model = 0;
                for (Index n = 0; n < N; ++n)
                    model += Hg(n, m) * p.theta[std::size_t(l)](n) * Hu(n, k);
                f -= std::norm(p.rtilde[std::size_t(l - 1)](m, k) - model) * p.rtilde_weight(l - 1);
            }
    for (Index l = L1 + 1; l <= N; ++l)
        for (Index m = 0; m < M; ++m)
        {
            std::complex<double> model = 0;
            for (Index n = 0; n < N; ++n)
                for (Index k = 0; k < K; ++k)
                    model += Hg(n, m) * p.theta[std::size_t(l)](n) * Hu(n, k) * p.xbar(k);
            f -= std::norm(p.rbar[std::size_t(l - 1)](m) - model) * p.rbar_weight(l - 1);
        }
    if (p.use_prior())
        for (Index m = 0; m < M; ++m)
            for (Index k = 0; k < K; ++k)
            {
                const CMatrix<double> &Ci = p.inv_cov(m, k);
                std::complex<double> q = 0;
                for (Index i = 0; i < N; ++i)
                    for (Index j = 0; j < N; ++j)
                        q += std::conj(Hg(i, m) * Hu(i, k)) * Ci(i, j) * Hg(j, m) * Hu(j, k);
                f -= q.real();
            }
    return f;
}

/// Weighted LS + Gaussian prior, solved densely: argmax -||b - A x||_W^2 - x^H P x.
inline CVector<double> dense_map(const CMatrix<double> &A, const CVector<double> &b, const RVector<double> &w, const CMatrix<double> &P)
{
    const CMatrix<double> AW = A.adjoint() * w.cast<std::complex<double>>().asDiagonal();
    const CMatrix<double> lhs = AW * A + P;
    return lhs.fullPivLu().solve(AW * b);
}

/// Dense oracle for the H_u update.
inline CMatrix<double> user_update_oracle(const MapProblem<double> &p, const CMatrix<double> &Hg)
{
    const Index M = p.dims.M, N = p.dims.N, K = p.dims.K, L1 = p.dims.L1();
    const Index rows = L1 * M * K + (N - L1) * M;
    CMatrix<double> A = CMatrix<double>::Zero(rows, N * K);
    CVector<double> b(rows);
    RVector<double> w(rows);
    Index r = 0;
    for (Index l = 1; l <= N; ++l)
    {
        const CMatrix<double> D = Hg.transpose() * p.theta[std::size_t(l)].asDiagonal();
        if (l <= L1)
            for (Index k = 0; k < K; ++k)
                for (Index m = 0; m < M; ++m, ++r)
                {
                    A.block(r, k * N, 1, N) = D.row(m);
                    b(r) = p.rtilde[std::size_t(l - 1)](m, k);
                    w(r) = p.rtilde_weight(l - 1);
                }
        else
            for (Index m = 0; m < M; ++m, ++r)
            {
                for (Index k = 0; k < K; ++k)
                    A.block(r, k * N, 1, N) = p.xbar(k) * D.row(m);
                b(r) = p.rbar[std::size_t(l - 1)](m);
                w(r) = p.rbar_weight(l - 1);
            }
    }
    CMatrix<double> P = CMatrix<double>::Zero(N * K, N * K);
    if (p.use_prior())
        for (Index k = 0; k < K; ++k)
            for (Index m = 0; m < M; ++m)
            {
                const CMatrix<double> Dg = Hg.col(m).asDiagonal();
                P.block(k * N, k * N, N, N) += Dg.adjoint() * p.inv_cov(m, k) * Dg;
            }
    const CVector<double> x = dense_map(A, b, w, P);
    return Eigen::Map<const CMatrix<double>>(x.data(), N, K);
}

/// Dense oracle for the H_g update.
inline CMatrix<double> common_update_oracle(const MapProblem<double> &p, const CMatrix<double> &Hu)
{
    const Index M = p.dims.M, N = p.dims.N, K = p.dims.K, L1 = p.dims.L1();
    const Index rows = L1 * M * K + (N - L1) * M;
    CMatrix<double> A = CMatrix<double>::Zero(rows, N * M);
    CVector<double> b(rows);
    RVector<double> w(rows);
    const CVector<double> u = Hu * p.xbar;
    Index r = 0;
    for (Index l = 1; l <= N; ++l)
    {
        const CVector<double> &t = p.theta[std::size_t(l)];
        for (Index m = 0; m < M; ++m)
        {
            if (l <= L1)
                for (Index k = 0; k < K; ++k, ++r)
                {
                    A.block(r, m * N, 1, N) = t.cwiseProduct(Hu.col(k)).transpose();
                    b(r) = p.rtilde[std::size_t(l - 1)](m, k);
                    w(r) = p.rtilde_weight(l - 1);
                }
            else
            {
                A.block(r, m * N, 1, N) = t.cwiseProduct(u).transpose();
                b(r) = p.rbar[std::size_t(l - 1)](m);
                w(r) = p.rbar_weight(l - 1);
                ++r;
            }
        }
    }
    CMatrix<double> P = CMatrix<double>::Zero(N * M, N * M);
    if (p.use_prior())
        for (Index m = 0; m < M; ++m)
            for (Index k = 0; k < K; ++k)
            {
                const CMatrix<double> Du = Hu.col(k).asDiagonal();
                P.block(m * N, m * N, N, N) += Du.adjoint() * p.inv_cov(m, k) * Du;
            }
    const CVector<double> x = dense_map(A, b, w, P);
    return Eigen::Map<const CMatrix<double>>(x.data(), N, M);
}

/// Central-difference gradient norm of f over the real and imaginary parts of X,
/// scaled to a relative figure ||grad|| ||X|| / |f|.
inline double relative_gradient(const std::function<double(const CMatrix<double> &)> &f, const CMatrix<double> &X)
{
    const double h = 1e-5 * X.norm() / std::sqrt(double(X.size()));
    double g2 = 0;
    for (Index i = 0; i < X.size(); ++i)
        for (std::complex<double> dir : {std::complex<double>(1, 0), std::complex<double>(0, 1)})
        {
            CMatrix<double> Xp = X, Xm = X;
            Xp(i) += h * dir;
            Xm(i) -= h * dir;
            const double g = (f(Xp) - f(Xm)) / (2 * h);
            g2 += g * g;
        }
    return std::sqrt(g2) * X.norm() / std::abs(f(X));
}

/// Best f_B over 16-level (or `levels`) quantized steering with the first phase fixed.
inline double exhaustive_quantized(const CMatrix<double> &E, int levels)
{
    const Index N = E.rows();
    std::vector<std::complex<double>> phase(static_cast<std::size_t>(levels));
    for (int q = 0; q < levels; ++q)
        phase[std::size_t(q)] = std::polar(1.0, 2.0 * double(EIGEN_PI) * q / levels);
    CVector<double> v = CVector<double>::Ones(N);
    std::vector<int> idx(static_cast<std::size_t>(N), 0);
    double best = eval_fB(v, E);
    while (true)
    {
        Index n = 1;
        while (n < N && idx[std::size_t(n)] == levels - 1)
        {
            idx[std::size_t(n)] = 0;
            v(n) = 1.0;
            ++n;
        }
        if (n >= N)
            break;
        v(n) = phase[std::size_t(++idx[std::size_t(n)])];
        best = std::max(best, eval_fB(v, E));
    }
    return best;
}

} // namespace irsce::test

#endif // IRSCE_TESTS_ORACLES_HPP
