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

#ifndef IRSCE_MAP_ESTIMATOR_HPP
#define IRSCE_MAP_ESTIMATOR_HPP

// MAP estimation of the cascaded channels h_I,k,m = diag(h_u,k) h_g,m by
// alternating closed-form maximization over the user-specific factor H_u
// (N x K) and the common-link factor H_g (N x M).
//
// Objective (maximized):
//   f_A = - sum_{l<=L1} w_l ||Rtilde_l - H_g^T diag(theta_l) H_u||_F^2
//         - sum_{l>L1}  wbar_l ||rbar_l - H_g^T diag(theta_l) H_u xbar||^2
//         - sum_{m,k} h_I,k,m^H (C_m^(k))^{-1} h_I,k,m
// with w_l, wbar_l the inverse noise variances of the preprocessed data.

#include "irsce/linalg.hpp"
#include "irsce/model.hpp"
#include "irsce/protocol.hpp"
#include "irsce/types.hpp"

#include <cmath>
#include <vector>

namespace irsce {

template <typename Real = double>
struct EstimatorConfig
{
    int max_iters = 20;
    Real tol = Real(1e-6);       ///< on |delta f_A| / |f_A|
    Real regularization = 0;     ///< epsilon * I added to every normal matrix
    bool use_prior = true;       ///< false: maximum likelihood (prior term dropped)
    Real noise_floor = Real(1e-12); ///< sigma0^2 used for noiseless data, relative to mean cascaded power
    int restarts = 0;            ///< extra runs from perturbed initial points; best f_A wins
    std::uint64_t restart_seed = 0;

    void validate() const
    {
        if (max_iters < 1)
            throw InvalidInput("EstimatorConfig: max_iters must be >= 1");
        if (!(tol > 0))
            throw InvalidInput("EstimatorConfig: tol must be > 0");
        if (regularization < 0 || !(noise_floor > 0) || restarts < 0)
            throw InvalidInput("EstimatorConfig: regularization >= 0, noise_floor > 0, restarts >= 0 required");
    }
};

/// Everything the alternating updates need, with inverse covariances and
/// phase Gram matrices precomputed once per training record.
template <typename Real = double>
struct MapProblem
{
    SystemDims dims;
    std::vector<CMatrix<Real>> rtilde; ///< l = 1..L1 at l-1
    std::vector<CVector<Real>> rbar;   ///< l = 1..N at l-1
    std::vector<CVector<Real>> theta;  ///< l = 0..N
    CMatrix<Real> phase_matrix;        ///< [theta_1 .. theta_N]
    CVector<Real> xbar;
    RVector<Real> rtilde_weight;       ///< 1 / sigma_l^2, l = 1..L1
    RVector<Real> rbar_weight;         ///< 1 / sigmabar_l^2, l = 1..N (only l > L1 enter f_A)
    std::vector<CMatrix<Real>> cov_inv; ///< (C_m^(k))^{-1} at m * K + k; empty without prior
    CMatrix<Real> stage1_gram;         ///< sum_{l<=L1} w_l conj(theta_l) theta_l^T
    CMatrix<Real> stage2_gram;         ///< sum_{l>L1} wbar_l conj(theta_l) theta_l^T
    Real regularization = 0;

    bool use_prior() const { return !cov_inv.empty(); }
    const CMatrix<Real> &inv_cov(Index m, Index k) const { return cov_inv[static_cast<std::size_t>(m * dims.K + k)]; }
};

template <typename Real>
MapProblem<Real> make_map_problem(const Observations<Real> &obs, const PhasePlan<Real> &plan,
                                  const CovarianceSet<Real> &cov, const EstimatorConfig<Real> &config = {})
{
    config.validate();
    const SystemDims &d = obs.dims;
    if (plan.N() != d.N || cov.M != d.M || cov.N != d.N || cov.K != d.K)
        throw InvalidInput("make_map_problem: plan / covariance dimensions do not match the observations");
    if (Index(obs.rtilde.size()) != d.L1() || Index(obs.rbar.size()) != d.N)
        throw InvalidInput("make_map_problem: observations are incomplete");

    MapProblem<Real> p;
    p.dims = d;
    p.rtilde = obs.rtilde;
    p.rbar = obs.rbar;
    p.xbar = obs.xbar;
    p.regularization = config.regularization;
    p.theta.reserve(static_cast<std::size_t>(d.N + 1));
    for (Index l = 0; l <= d.N; ++l)
        p.theta.push_back(plan.reflection(l));
    p.phase_matrix = plan.phase_matrix();

    RVector<Real> rt_var = obs.rtilde_variance;
    RVector<Real> rb_var = obs.rbar_variance;
    if (!(obs.noise_variance > 0))
    {
        // noiseless record: keep the variance pattern, pin its level to a small fraction of the signal power
        const Real s2 = config.noise_floor * (cov.cascaded_.empty() ? Real(1) : cov.mean_cascaded_power());
        const Real K = Real(d.K);
        for (Index l = 0; l < d.L1(); ++l)
            rt_var(l) = (l == 0 ? Real(1) : Real(3)) * s2 / (Real(2) * K);
        for (Index l = 0; l < d.N; ++l)
            rb_var(l) = (l == 0 ? Real(0.5) : Real(1.5)) * s2;
    }
    p.rtilde_weight = rt_var.cwiseInverse();
    p.rbar_weight = rb_var.cwiseInverse();

    if (config.use_prior)
    {
        p.cov_inv.reserve(static_cast<std::size_t>(d.M * d.K));
        for (Index m = 0; m < d.M; ++m)
            for (Index k = 0; k < d.K; ++k)
                p.cov_inv.push_back(hermitian_inverse<Real>(cov.cascaded(m, k)));
    }

    p.stage1_gram = CMatrix<Real>::Zero(d.N, d.N);
    p.stage2_gram = CMatrix<Real>::Zero(d.N, d.N);
    for (Index l = 1; l <= d.N; ++l)
    {
        const CVector<Real> &t = p.theta[static_cast<std::size_t>(l)];
        if (l <= d.L1())
            p.stage1_gram += p.rtilde_weight(l - 1) * t.conjugate() * t.transpose();
        else
            p.stage2_gram += p.rbar_weight(l - 1) * t.conjugate() * t.transpose();
    }
    return p;
}

/// Cascaded channel estimates Hhat_I,k = H_g^T diag(h_u,k), k = 0..K-1 (each M x N).
template <typename Real>
std::vector<CMatrix<Real>> cascaded_from_factors(const CMatrix<Real> &Hg, const CMatrix<Real> &Hu)
{
    std::vector<CMatrix<Real>> out;
    out.reserve(static_cast<std::size_t>(Hu.cols()));
    for (Index k = 0; k < Hu.cols(); ++k)
        out.push_back(Hg.transpose() * Hu.col(k).asDiagonal());
    return out;
}

/// Least-squares common-link initialization H_g = ([rbar_1..rbar_N] Phi^{-1})^T.
template <typename Real>
CMatrix<Real> init_common_link(const CMatrix<Real> &rbar_matrix, const CMatrix<Real> &phase_matrix)
{
    return right_divide<Real>(rbar_matrix, phase_matrix, "init_common_link").transpose();
}

template <typename Real>
CMatrix<Real> init_common_link(const MapProblem<Real> &p)
{
    CMatrix<Real> R(p.dims.M, p.dims.N);
    for (Index l = 0; l < p.dims.N; ++l)
        R.col(l) = p.rbar[static_cast<std::size_t>(l)];
    return init_common_link<Real>(R, p.phase_matrix);
}

template <typename Real>
Real objective(const MapProblem<Real> &p, const CMatrix<Real> &Hg, const CMatrix<Real> &Hu)
{
    const SystemDims &d = p.dims;
    if (Hg.rows() != d.N || Hg.cols() != d.M || Hu.rows() != d.N || Hu.cols() != d.K)
        throw InvalidInput("objective: factor shapes must be N x M and N x K");
    Real f = 0;
    const CMatrix<Real> HgT = Hg.transpose();
    for (Index l = 1; l <= d.L1(); ++l)
    {
        const CMatrix<Real> model = HgT * p.theta[static_cast<std::size_t>(l)].asDiagonal() * Hu;
        f -= p.rtilde_weight(l - 1) * (p.rtilde[static_cast<std::size_t>(l - 1)] - model).squaredNorm();
    }
    const CVector<Real> u = Hu * p.xbar;
    for (Index l = d.L1() + 1; l <= d.N; ++l)
    {
        const CVector<Real> model = HgT * p.theta[static_cast<std::size_t>(l)].cwiseProduct(u);
        f -= p.rbar_weight(l - 1) * (p.rbar[static_cast<std::size_t>(l - 1)] - model).squaredNorm();
    }
    if (p.use_prior())
        for (Index m = 0; m < d.M; ++m)
            for (Index k = 0; k < d.K; ++k)
            {
                const CVector<Real> h = Hu.col(k).cwiseProduct(Hg.col(m));
                f -= (h.adjoint() * p.inv_cov(m, k) * h)(0, 0).real();
            }
    return f;
}

/// Global maximizer of f_A over H_u for fixed H_g: vec(H_u) = Lambda_u^{-1} nu_u with
///   Lambda_u = blkdiag(C_u,k) + I_K (x) A1 + (xbar^* xbar^T) (x) A2,
///   A_i = (sum_l w_l conj(theta_l) theta_l^T) o (conj(H_g) H_g^T).
template <typename Real>
CMatrix<Real> update_user_specific(const MapProblem<Real> &p, const CMatrix<Real> &Hg)
{
    const SystemDims &d = p.dims;
    const Index N = d.N, K = d.K;
    if (Hg.rows() != N || Hg.cols() != d.M)
        throw InvalidInput("update_user_specific: H_g must be N x M");

    const CMatrix<Real> gram = Hg.conjugate() * Hg.transpose();
    const CMatrix<Real> A1 = p.stage1_gram.cwiseProduct(gram);
    const CMatrix<Real> A2 = p.stage2_gram.cwiseProduct(gram);

    CMatrix<Real> Lambda(N * K, N * K);
    for (Index k = 0; k < K; ++k)
        for (Index kp = 0; kp < K; ++kp)
        {
            auto block = Lambda.block(k * N, kp * N, N, N);
            block = (std::conj(p.xbar(k)) * p.xbar(kp)) * A2;
            if (k == kp)
            {
                block += A1;
                if (p.use_prior())
                    for (Index m = 0; m < d.M; ++m)
                        block += (Hg.col(m).conjugate() * Hg.col(m).transpose()).cwiseProduct(p.inv_cov(m, k));
            }
        }

    CMatrix<Real> V = CMatrix<Real>::Zero(N, K);
    const CMatrix<Real> HgConj = Hg.conjugate();
    for (Index l = 1; l <= d.L1(); ++l)
        V += p.rtilde_weight(l - 1) *
             (p.theta[static_cast<std::size_t>(l)].conjugate().asDiagonal() * (HgConj * p.rtilde[static_cast<std::size_t>(l - 1)]));
    for (Index l = d.L1() + 1; l <= d.N; ++l)
    {
        const CVector<Real> dh = p.theta[static_cast<std::size_t>(l)].conjugate().cwiseProduct(HgConj * p.rbar[static_cast<std::size_t>(l - 1)]);
        V += p.rbar_weight(l - 1) * dh * p.xbar.adjoint();
    }
    const CVector<Real> nu = Eigen::Map<const CVector<Real>>(V.data(), N * K);

    const CVector<Real> x = solve_hermitian<Real>(Lambda, nu, p.regularization, "update_user_specific");
    return Eigen::Map<const CMatrix<Real>>(x.data(), N, K);
}

/// Global maximizer of f_A over H_g for fixed H_u; one N x N solve per antenna m with
///   Lambda_g,m = C_g,m + (sum_{l<=L1} w_l conj(theta_l) theta_l^T) o (conj(H_u) H_u^T)
///               + (sum_{l>L1} wbar_l conj(theta_l) theta_l^T) o (conj(u) u^T),  u = H_u xbar,
///   C_g,m = sum_k diag(h_u,k)^H (C_m^(k))^{-1} diag(h_u,k).
template <typename Real>
CMatrix<Real> update_common_link(const MapProblem<Real> &p, const CMatrix<Real> &Hu)
{
    const SystemDims &d = p.dims;
    const Index N = d.N, M = d.M, K = d.K;
    if (Hu.rows() != N || Hu.cols() != K)
        throw InvalidInput("update_common_link: H_u must be N x K");

    const CVector<Real> u = Hu * p.xbar;
    const CMatrix<Real> common = p.stage1_gram.cwiseProduct(Hu.conjugate() * Hu.transpose()) +
                                 p.stage2_gram.cwiseProduct(u.conjugate() * u.transpose());

    CMatrix<Real> nu = CMatrix<Real>::Zero(N, M);
    const CMatrix<Real> HuConj = Hu.conjugate();
    for (Index l = 1; l <= d.L1(); ++l)
        nu += p.rtilde_weight(l - 1) * (p.theta[static_cast<std::size_t>(l)].conjugate().asDiagonal() *
                                        (HuConj * p.rtilde[static_cast<std::size_t>(l - 1)].transpose()));
    for (Index l = d.L1() + 1; l <= d.N; ++l)
        nu += p.rbar_weight(l - 1) * (p.theta[static_cast<std::size_t>(l)].cwiseProduct(u)).conjugate() *
              p.rbar[static_cast<std::size_t>(l - 1)].transpose();

    CMatrix<Real> Hg(N, M);
    for (Index m = 0; m < M; ++m)
    {
        CMatrix<Real> Lambda = common;
        if (p.use_prior())
            for (Index k = 0; k < K; ++k)
                Lambda += (Hu.col(k).conjugate() * Hu.col(k).transpose()).cwiseProduct(p.inv_cov(m, k));
        Hg.col(m) = solve_hermitian<Real>(Lambda, nu.col(m), p.regularization, "update_common_link");
    }
    return Hg;
}

template <typename Real = double>
struct EstimatorState
{
    CMatrix<Real> Hg; ///< N x M common-link factor
    CMatrix<Real> Hu; ///< N x K user-specific factor
    std::vector<Real> objective_trajectory; ///< f_A after each full iteration
    std::vector<Real> step_trajectory;      ///< f_A after every individual update
    int iterations = 0;
    bool converged = false;
};

template <typename Real = double>
struct EstimateResult
{
    std::vector<CMatrix<Real>> cascaded; ///< Hhat_I,k, K entries of M x N
    EstimatorState<Real> state;
};

namespace detail {
template <typename Real>
EstimatorState<Real> run_alternating(const MapProblem<Real> &p, CMatrix<Real> Hg, const EstimatorConfig<Real> &cfg)
{
    EstimatorState<Real> st;
    Real previous = 0;
    for (int it = 1; it <= cfg.max_iters; ++it)
    {
        st.Hu = update_user_specific(p, Hg);
        st.step_trajectory.push_back(objective(p, Hg, st.Hu));
        Hg = update_common_link(p, st.Hu);
        const Real f = objective(p, Hg, st.Hu);
        st.step_trajectory.push_back(f);
        st.objective_trajectory.push_back(f);
        st.iterations = it;
        if (it > 1 && std::abs(f - previous) <= cfg.tol * std::abs(f))
        {
            st.converged = true;
            break;
        }
        previous = f;
    }
    st.Hg = std::move(Hg);
    return st;
}
} // namespace detail

/// LS initialization followed by alternating H_u / H_g updates until the
/// relative change of f_A drops below `tol` or `max_iters` is reached.
template <typename Real>
EstimateResult<Real> estimate(const MapProblem<Real> &p, const EstimatorConfig<Real> &cfg = {})
{
    cfg.validate();
    const CMatrix<Real> init = init_common_link(p);
    EstimatorState<Real> best = detail::run_alternating(p, init, cfg);

    if (cfg.restarts > 0)
    {
        Rng rng(cfg.restart_seed);
        const Real scale = init.norm() / std::sqrt(Real(init.size()));
        for (int r = 0; r < cfg.restarts; ++r)
        {
            CMatrix<Real> start = init + complex_gaussian_matrix<Real>(rng, init.rows(), init.cols(), Real(0.1) * scale * scale);
            EstimatorState<Real> trial = detail::run_alternating(p, std::move(start), cfg);
            if (trial.objective_trajectory.back() > best.objective_trajectory.back())
                best = std::move(trial);
        }
    }

    EstimateResult<Real> out;
    out.cascaded = cascaded_from_factors<Real>(best.Hg, best.Hu);
    out.state = std::move(best);
    return out;
}

/// LMMSE direct-channel estimate hhat_d,k = C_d,k (C_d,k + sigma0^2/(2K) I)^{-1} r_0,k.
template <typename Real>
CMatrix<Real> estimate_direct(const CMatrix<Real> &R0, const std::vector<CMatrix<Real>> &cov_direct, Real noise_variance,
                              Index K)
{
    if (R0.cols() != K || Index(cov_direct.size()) != K)
        throw InvalidInput("estimate_direct: R0 must have K columns and one covariance per user");
    CMatrix<Real> out(R0.rows(), K);
    const Real s2 = noise_variance / (Real(2) * Real(K));
    for (Index k = 0; k < K; ++k)
    {
        const CMatrix<Real> &C = cov_direct[static_cast<std::size_t>(k)];
        if (C.rows() != R0.rows() || C.cols() != R0.rows())
            throw InvalidInput("estimate_direct: covariance must be M x M");
        if (!(s2 > 0))
        {
            out.col(k) = R0.col(k);
            continue;
        }
        CMatrix<Real> A = C;
        A.diagonal().array() += s2;
        // C (C + s2 I)^{-1} r = C * solve(C + s2 I, r)
        out.col(k) = C * solve_hermitian<Real>(A, R0.col(k), Real(0), "estimate_direct");
    }
    return out;
}

/// sum ||h - hhat||^2 / sum ||h||^2 over all users.
template <typename Real>
Real nmse(const std::vector<CMatrix<Real>> &estimates, const std::vector<CMatrix<Real>> &truth)
{
    if (estimates.size() != truth.size())
        throw InvalidInput("nmse: estimate and truth counts differ");
    Real err = 0, ref = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        if (estimates[i].rows() != truth[i].rows() || estimates[i].cols() != truth[i].cols())
            throw InvalidInput("nmse: shape mismatch");
        err += (truth[i] - estimates[i]).squaredNorm();
        ref += truth[i].squaredNorm();
    }
    if (!(ref > 0))
        throw InvalidInput("nmse: reference channels are all zero");
    return err / ref;
}

} // namespace irsce

#endif // IRSCE_MAP_ESTIMATOR_HPP
