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

#ifndef IRSCE_BASELINE_ONOFF_HPP
#define IRSCE_BASELINE_ONOFF_HPP

// Selected on-off training, used as the comparison baseline.
//
// Stage I   : K samples, IRS off, users send X (direct channels).
// Stage II  : N samples, user 1 alone with the IRS fully on, phases Phi.
// Stage III : for every user k >= 2, ceil(N/M) samples in which only one
//             block of at most M consecutive elements reflects (phase 1).
// User 1's cascaded channel is the reference; the others are recovered as
// Hhat_I,k = Hhat_I,1 diag(h_u,k) with h_u,k = diag(h_r,1)^{-1} h_r,k.

#include "irsce/linalg.hpp"
#include "irsce/model.hpp"
#include "irsce/protocol.hpp"
#include "irsce/types.hpp"

#include <Eigen/QR>

#include <vector>

namespace irsce {

template <typename Real = double>
struct OnOffPlan
{
    SystemDims dims;
    CMatrix<Real> reference_phases;   ///< N x N phase matrix of stage II
    std::vector<Index> block_start;   ///< first element of each stage-III block
    std::vector<Index> block_length;  ///< min(M, remaining)
    std::vector<RVector<Real>> masks; ///< per stage-III slot, 0/1 of length N

    Index blocks() const { return static_cast<Index>(masks.size()); }
    Index total_samples() const { return dims.K + dims.N + blocks() * (dims.K - 1); }

    /// Fraction of the N elements reflecting in stage-III slot b.
    Real reflection_fraction(Index b) const { return masks[static_cast<std::size_t>(b)].sum() / Real(dims.N); }
};

template <typename Real = double>
OnOffPlan<Real> make_onoff_plan(const SystemDims &dims)
{
    OnOffPlan<Real> plan;
    plan.dims = dims;
    plan.reference_phases = dft_matrix<Real>(dims.N, false);
    for (Index start = 0; start < dims.N; start += dims.M)
    {
        const Index len = std::min(dims.M, dims.N - start);
        RVector<Real> mask = RVector<Real>::Zero(dims.N);
        mask.segment(start, len).setOnes();
        plan.block_start.push_back(start);
        plan.block_length.push_back(len);
        plan.masks.push_back(std::move(mask));
    }
    return plan;
}

template <typename Real = double>
struct OnOffRecord
{
    SystemDims dims;
    CMatrix<Real> stage1;             ///< M x K
    CMatrix<Real> stage2;             ///< M x N
    std::vector<CMatrix<Real>> stage3; ///< users 2..K, each M x blocks
    Real noise_variance = 0;

    Index sample_count() const
    {
        Index n = stage1.cols() + stage2.cols();
        for (const auto &s : stage3)
            n += s.cols();
        return n;
    }
};

template <typename Real>
OnOffRecord<Real> simulate_onoff(const ChannelRealization<Real> &ch, const OnOffPlan<Real> &plan,
                                 const PilotMatrix<Real> &pilots, Real noise_variance, Rng &rng)
{
    const SystemDims &d = plan.dims;
    if (ch.M() != d.M || ch.N() != d.N || ch.K() != d.K || pilots.K() != d.K)
        throw InvalidInput("simulate_onoff: dimension mismatch");
    if (noise_variance < 0)
        throw InvalidInput("simulate_onoff: noise variance must be nonnegative");

    auto noise = [&](Index rows, Index cols) {
        return noise_variance > 0 ? complex_gaussian_matrix<Real>(rng, rows, cols, noise_variance)
                                  : CMatrix<Real>(CMatrix<Real>::Zero(rows, cols));
    };

    OnOffRecord<Real> rec;
    rec.dims = d;
    rec.noise_variance = noise_variance;
    rec.stage1 = ch.direct * pilots.X + noise(d.M, d.K);

    const CMatrix<Real> H1 = cascaded_channel<Real>(ch.bs_irs, ch.irs_user.col(0));
    rec.stage2 = (H1 * plan.reference_phases).colwise() + ch.direct.col(0);
    rec.stage2 += noise(d.M, d.N);

    for (Index k = 1; k < d.K; ++k)
    {
        const CMatrix<Real> Hk = cascaded_channel<Real>(ch.bs_irs, ch.irs_user.col(k));
        CMatrix<Real> Y(d.M, plan.blocks());
        for (Index b = 0; b < plan.blocks(); ++b)
            Y.col(b) = ch.direct.col(k) + Hk * plan.masks[static_cast<std::size_t>(b)].template cast<Complex<Real>>();
        rec.stage3.push_back(Y + noise(d.M, plan.blocks()));
    }
    return rec;
}

template <typename Real>
OnOffRecord<Real> simulate_onoff(const ChannelRealization<Real> &ch, const OnOffPlan<Real> &plan,
                                 const PilotMatrix<Real> &pilots, Real noise_variance, std::uint64_t seed)
{
    Rng rng(seed);
    return simulate_onoff(ch, plan, pilots, noise_variance, rng);
}

/// LS reconstruction of the reference cascaded channel: Y Phi^{-1}, Y already free of the direct channel.
template <typename Real>
CMatrix<Real> estimate_reference(const CMatrix<Real> &observations, const CMatrix<Real> &phase_matrix)
{
    return right_divide<Real>(observations, phase_matrix, "estimate_reference");
}

enum class RelativeEstimator
{
    least_squares,
    lmmse,
};

template <typename Real = double>
struct RelativeOptions
{
    RelativeEstimator mode = RelativeEstimator::least_squares;
    CMatrix<Real> covariance; ///< N x N covariance of h_u,k (lmmse only)
    Real noise_variance = 0;  ///< per-entry noise of the stage-III samples (lmmse only)
};

/// Recovers h_u,k block by block from the stage-III samples of one user (direct channel removed).
template <typename Real>
CVector<Real> estimate_relative(const CMatrix<Real> &observations, const CMatrix<Real> &reference,
                                const OnOffPlan<Real> &plan, const RelativeOptions<Real> &opt = {})
{
    const SystemDims &d = plan.dims;
    if (observations.rows() != d.M || observations.cols() != plan.blocks() || reference.rows() != d.M ||
        reference.cols() != d.N)
        throw InvalidInput("estimate_relative: shape mismatch");
    const bool lmmse = opt.mode == RelativeEstimator::lmmse;
    if (lmmse && (opt.covariance.rows() != d.N || opt.covariance.cols() != d.N))
        throw InvalidInput("estimate_relative: lmmse mode needs an N x N covariance");

    CVector<Real> hu(d.N);
    for (Index b = 0; b < plan.blocks(); ++b)
    {
        const Index s = plan.block_start[static_cast<std::size_t>(b)];
        const Index len = plan.block_length[static_cast<std::size_t>(b)];
        const CMatrix<Real> A = reference.middleCols(s, len);
        const CVector<Real> y = observations.col(b);
        if (lmmse)
        {
            const CMatrix<Real> C = opt.covariance.block(s, s, len, len);
            CMatrix<Real> S = A * C * A.adjoint();
            S.diagonal().array() += opt.noise_variance;
            hu.segment(s, len) = C * A.adjoint() * solve_hermitian<Real>(S, y, Real(0), "estimate_relative");
            continue;
        }
        Eigen::ColPivHouseholderQR<CMatrix<Real>> qr(A);
        if (qr.rank() == len)
            hu.segment(s, len) = qr.solve(y);
        else
        {
            warn("estimate_relative: reference block is singular, using a regularized solve");
            const CMatrix<Real> G = A.adjoint() * A;
            const Real load = std::max(Real(1e-12) * G.diagonal().real().cwiseAbs().maxCoeff(), std::numeric_limits<Real>::min());
            hu.segment(s, len) = solve_hermitian<Real>(G, A.adjoint() * y, load, "estimate_relative");
        }
    }
    return hu;
}

/// Full baseline: reference from stage II, relative channels from stage III.
/// `direct` is the M x K direct channel removed from stages II and III.
/// `per_user` is empty (least squares for everyone) or holds options for users 2..K.
template <typename Real>
std::vector<CMatrix<Real>> estimate_onoff(const OnOffRecord<Real> &rec, const OnOffPlan<Real> &plan,
                                          const CMatrix<Real> &direct,
                                          const std::vector<RelativeOptions<Real>> &per_user = {})
{
    const SystemDims &d = plan.dims;
    if (direct.rows() != d.M || direct.cols() != d.K || Index(rec.stage3.size()) != d.K - 1)
        throw InvalidInput("estimate_onoff: record or direct channel has wrong shape");
    if (!per_user.empty() && Index(per_user.size()) != d.K - 1)
        throw InvalidInput("estimate_onoff: need options for each of the K - 1 non-reference users");
    const RelativeOptions<Real> ls{};
    std::vector<CMatrix<Real>> out;
    out.reserve(static_cast<std::size_t>(d.K));
    const CMatrix<Real> Y2 = rec.stage2.colwise() - direct.col(0);
    out.push_back(estimate_reference<Real>(Y2, plan.reference_phases));
    for (Index k = 1; k < d.K; ++k)
    {
        const CMatrix<Real> Y3 = rec.stage3[static_cast<std::size_t>(k - 1)].colwise() - direct.col(k);
        const auto &opt = per_user.empty() ? ls : per_user[static_cast<std::size_t>(k - 1)];
        const CVector<Real> hu = estimate_relative<Real>(Y3, out.front(), plan, opt);
        out.push_back(out.front() * hu.asDiagonal());
    }
    return out;
}

/// LS direct-channel estimate from stage I: Y X^{-1} (noise variance sigma0^2 / K per entry).
template <typename Real>
CMatrix<Real> estimate_direct_onoff(const OnOffRecord<Real> &rec, const PilotMatrix<Real> &pilots)
{
    return rec.stage1 * pilots.X.adjoint() / Real(pilots.K());
}

/// Sample covariance of h_u,k = diag(h_r,1)^{-1} h_r,k over `draws` independent channels.
template <typename Real>
CMatrix<Real> relative_channel_covariance(const SystemDims &dims, const AngularBases<Real> &bases,
                                          const ChannelStatistics<Real> &stats, Index k, Index draws, Rng &rng)
{
    if (k < 1 || k >= dims.K || draws < 1)
        throw InvalidInput("relative_channel_covariance: need 1 <= k < K and draws >= 1");
    CMatrix<Real> samples(dims.N, draws);
    for (Index j = 0; j < draws; ++j)
    {
        const auto ch = sample_channels(dims, bases, stats, rng);
        samples.col(j) = ch.irs_user.col(k).cwiseQuotient(ch.irs_user.col(0));
    }
    return estimate_covariance_from_samples<Real>(samples);
}

} // namespace irsce

#endif // IRSCE_BASELINE_ONOFF_HPP
