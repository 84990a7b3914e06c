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

#ifndef IRSCE_PROTOCOL_HPP
#define IRSCE_PROTOCOL_HPP

// Always-ON two-stage uplink training.
//
// Stage I  : slots l = 0..L1, each K samples; users send the columns of X.
// Stage II : slots l = L1+1..N, one sample each; users send xbar = X(:, 0).
// theta_0 = -theta_1 so that the direct channel cancels in the differences.

#include "irsce/linalg.hpp"
#include "irsce/model.hpp"
#include "irsce/types.hpp"

#include <vector>

namespace irsce {

template <typename Real = double>
struct PilotMatrix
{
    CMatrix<Real> X;   ///< K x K, X^H X = K I, unit-modulus entries
    CVector<Real> xbar; ///< first column of X

    Index K() const { return X.rows(); }
};

/// Unnormalized K-point DFT pilots; xbar is all ones.
template <typename Real = double>
PilotMatrix<Real> build_pilots(Index K)
{
    if (K < 1)
        throw InvalidInput("build_pilots: K must be positive");
    PilotMatrix<Real> p;
    p.X = dft_matrix<Real>(K, false);
    p.xbar = p.X.col(0);
    return p;
}

template <typename Real = double>
struct PhasePlan
{
    std::vector<CVector<Real>> theta;     ///< N + 1 vectors, index = slot l
    CVector<Real> vartheta;               ///< steering direction
    std::vector<RVector<Real>> amplitude; ///< N + 1 masks (all ones here)

    Index N() const { return vartheta.size(); }

    /// Effective reflection vector of slot l (phase times amplitude mask).
    CVector<Real> reflection(Index l) const
    {
        return theta[static_cast<std::size_t>(l)].cwiseProduct(amplitude[static_cast<std::size_t>(l)].template cast<Complex<Real>>());
    }

    /// Phi = [theta_1, ..., theta_N].
    CMatrix<Real> phase_matrix() const
    {
        CMatrix<Real> Phi(N(), N());
        for (Index l = 1; l <= N(); ++l)
            Phi.col(l - 1) = theta[static_cast<std::size_t>(l)];
        return Phi;
    }
};

template <typename Real>
bool is_unit_modulus(const CVector<Real> &v, Real tol)
{
    return ((v.cwiseAbs().array() - Real(1)).abs() <= tol).all();
}

/// theta_l = diag(vartheta) f_l (f_l: column l of the unnormalized N-point DFT), theta_0 = -theta_1.
template <typename Real>
PhasePlan<Real> build_phase_plan(const CVector<Real> &vartheta)
{
    const Index N = vartheta.size();
    if (N < 1)
        throw InvalidInput("build_phase_plan: empty steering vector");
    if (!is_unit_modulus(vartheta, Real(1e-9)))
        throw InvalidInput("build_phase_plan: steering vector entries must have unit modulus");
    const CMatrix<Real> F = dft_matrix<Real>(N, false);
    PhasePlan<Real> plan;
    plan.vartheta = vartheta;
    plan.theta.resize(static_cast<std::size_t>(N + 1));
    for (Index l = 1; l <= N; ++l)
        plan.theta[static_cast<std::size_t>(l)] = vartheta.cwiseProduct(F.col(l - 1));
    plan.theta[0] = -plan.theta[1];
    plan.amplitude.assign(static_cast<std::size_t>(N + 1), RVector<Real>::Ones(N));
    return plan;
}

// ----- Sample layout -----------------------------------------------------

struct SampleSlot
{
    Index slot = 0;   ///< timeslot l in 0..N
    Index column = 0; ///< pilot column within a stage-I slot; 0 in stage II
    bool stage_one = true;

    friend bool operator==(const SampleSlot &, const SampleSlot &) = default;
};

/// Time-ordered slot table: entry t (0-based) describes received sample y_{t+1}.
inline std::vector<SampleSlot> sample_layout(const SystemDims &dims)
{
    std::vector<SampleSlot> table;
    table.reserve(static_cast<std::size_t>(dims.total_samples()));
    for (Index l = 0; l <= dims.L1(); ++l)
        for (Index c = 0; c < dims.K; ++c)
            table.push_back({l, c, true});
    for (Index l = dims.L1() + 1; l <= dims.N; ++l)
        table.push_back({l, 0, false});
    return table;
}

/// 0-based index of the sample ybar_l: y_{1+Kl} in stage I, y_{l+(K-1)L1+K} in stage II.
inline Index virtual_sample_index(const SystemDims &dims, Index l)
{
    if (l < 0 || l > dims.N)
        throw InvalidInput("virtual_sample_index: slot out of range");
    if (l <= dims.L1())
        return dims.K * l;
    return l + (dims.K - 1) * dims.L1() + dims.K - 1;
}

template <typename Real = double>
struct TrainingRecord
{
    SystemDims dims;
    CMatrix<Real> samples; ///< M x total_samples, time ordered
    Real noise_variance = 0;

    /// Y_l (M x K) for stage-I slot l.
    auto stage_block(Index l) const { return samples.middleCols(dims.K * l, dims.K); }
    /// ybar_l for l = 0..N.
    auto virtual_sample(Index l) const { return samples.col(virtual_sample_index(dims, l)); }
};

/// Warns when an entry of H_r xbar is tiny relative to the mean magnitude. Returns true if well conditioned.
template <typename Real>
bool check_virtual_reference(const ChannelRealization<Real> &ch, const PilotMatrix<Real> &pilots, Real rel_tol = Real(1e-6))
{
    const CVector<Real> v = ch.irs_user * pilots.xbar;
    const Real mean = v.cwiseAbs().mean();
    if (mean <= Real(0) || v.cwiseAbs().minCoeff() < rel_tol * mean)
    {
        warn("virtual reference H_r xbar has a near-zero entry; common-link initialization is ill conditioned");
        return false;
    }
    return true;
}

/// Runs the two-stage protocol: y_t = (H_d + G^T diag(theta_l) H_r) x_t + z_t with z ~ CN(0, sigma0^2 I).
template <typename Real>
TrainingRecord<Real> simulate_training(const ChannelRealization<Real> &ch, const PhasePlan<Real> &plan,
                                       const PilotMatrix<Real> &pilots, Real noise_variance, Rng &rng)
{
    const Index M = ch.M(), N = ch.N(), K = ch.K();
    if (plan.N() != N || Index(plan.theta.size()) != N + 1 || pilots.K() != K || ch.direct.rows() != M ||
        ch.direct.cols() != K || ch.irs_user.rows() != N)
        throw InvalidInput("simulate_training: dimension mismatch between channels, plan and pilots");
    if (noise_variance < 0)
        throw InvalidInput("simulate_training: noise variance must be nonnegative");

    TrainingRecord<Real> rec;
    rec.dims = SystemDims::make(M, N, K);
    rec.noise_variance = noise_variance;
    const auto layout = sample_layout(rec.dims);
    rec.samples.resize(M, static_cast<Index>(layout.size()));

    check_virtual_reference(ch, pilots);

    Index current = -1;
    CMatrix<Real> A;
    for (std::size_t t = 0; t < layout.size(); ++t)
    {
        const SampleSlot &s = layout[t];
        if (s.slot != current)
        {
            A = ch.direct + ch.bs_irs.transpose() * plan.reflection(s.slot).asDiagonal() * ch.irs_user;
            current = s.slot;
        }
        CVector<Real> y = s.stage_one ? CVector<Real>(A * pilots.X.col(s.column)) : CVector<Real>(A * pilots.xbar);
        if (noise_variance > 0)
            for (Index i = 0; i < M; ++i)
                y(i) += complex_gaussian<Real>(rng, noise_variance);
        rec.samples.col(static_cast<Index>(t)) = y;
    }
    return rec;
}

template <typename Real>
TrainingRecord<Real> simulate_training(const ChannelRealization<Real> &ch, const PhasePlan<Real> &plan,
                                       const PilotMatrix<Real> &pilots, Real noise_variance, std::uint64_t seed)
{
    Rng rng(seed);
    return simulate_training(ch, plan, pilots, noise_variance, rng);
}

/// Direct-channel-free observations used by the MAP estimator.
template <typename Real = double>
struct Observations
{
    SystemDims dims;
    CMatrix<Real> R0;                  ///< (Y_0 + Y_1) X^{-1} / 2 = H_d + noise
    std::vector<CMatrix<Real>> rtilde; ///< Rtilde_l for l = 1..L1 at index l-1 (M x K)
    std::vector<CVector<Real>> rbar;   ///< rbar_l for l = 1..N at index l-1
    RVector<Real> rtilde_variance;     ///< per-entry noise variance of Rtilde_l (L1)
    RVector<Real> rbar_variance;       ///< per-entry noise variance of rbar_l (N)
    Real noise_variance = 0;           ///< sigma0^2 of the raw samples
    CVector<Real> xbar;

    /// [rbar_1, ..., rbar_N] (M x N).
    CMatrix<Real> rbar_matrix() const
    {
        CMatrix<Real> out(dims.M, dims.N);
        for (Index l = 0; l < dims.N; ++l)
            out.col(l) = rbar[static_cast<std::size_t>(l)];
        return out;
    }
};

/// Removes the direct channel and the pilots from a training record.
///
/// R0 = (Y0 + Y1) X^{-1} / 2,  Rtilde_1 = (Y1 - Y0) X^{-1} / 2,
/// Rtilde_l = (Y_l - (Y0 + Y1) / 2) X^{-1} for l = 2..L1,
/// rbar_l = ybar_l - (ybar_0 + ybar_1) / 2 for l = 1..N.
/// With X^H X = K I the noise variances are sigma0^2/(2K), 3 sigma0^2/(2K)
/// and 3 sigma0^2 / 2 (sigma0^2 / 2 for rbar_1).
template <typename Real>
Observations<Real> preprocess(const TrainingRecord<Real> &rec, const PilotMatrix<Real> &pilots)
{
    const SystemDims &d = rec.dims;
    if (rec.samples.rows() != d.M || rec.samples.cols() != d.total_samples())
        throw InvalidInput("preprocess: record is missing slots");
    if (pilots.K() != d.K)
        throw InvalidInput("preprocess: pilot size does not match K");

    const CMatrix<Real> Xinv = pilots.X.adjoint() / Real(d.K);
    const Real s2 = rec.noise_variance;
    const Real K = Real(d.K);

    Observations<Real> obs;
    obs.dims = d;
    obs.noise_variance = s2;
    obs.xbar = pilots.xbar;

    const CMatrix<Real> Y0 = rec.stage_block(0);
    const CMatrix<Real> Y1 = rec.stage_block(1);
    const CMatrix<Real> mean01 = (Y0 + Y1) * Real(0.5);
    obs.R0 = mean01 * Xinv;

    const Index L1 = d.L1();
    obs.rtilde.reserve(static_cast<std::size_t>(L1));
    obs.rtilde_variance.resize(L1);
    obs.rtilde.push_back((Y1 - Y0) * Real(0.5) * Xinv);
    obs.rtilde_variance(0) = s2 / (Real(2) * K);
    for (Index l = 2; l <= L1; ++l)
    {
        obs.rtilde.push_back((CMatrix<Real>(rec.stage_block(l)) - mean01) * Xinv);
        obs.rtilde_variance(l - 1) = Real(3) * s2 / (Real(2) * K);
    }

    const CVector<Real> ybar_mean = (rec.virtual_sample(0) + rec.virtual_sample(1)) * Real(0.5);
    obs.rbar.reserve(static_cast<std::size_t>(d.N));
    obs.rbar_variance.resize(d.N);
    for (Index l = 1; l <= d.N; ++l)
    {
        obs.rbar.push_back(CVector<Real>(rec.virtual_sample(l)) - ybar_mean);
        obs.rbar_variance(l - 1) = (l == 1 ? Real(0.5) : Real(1.5)) * s2;
    }
    return obs;
}

} // namespace irsce

#endif // IRSCE_PROTOCOL_HPP
