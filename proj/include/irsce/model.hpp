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

#ifndef IRSCE_MODEL_HPP
#define IRSCE_MODEL_HPP

// System dimensions, angular-domain Gaussian channel synthesis, and the
// cascaded-channel / covariance algebra shared by every estimator.
//
// Channel model: with unitary DFT bases F_B (M x M) and F_R (N x N),
//   G      = F_R * Gdd * F_B^T,   Gdd(n, j) ~ CN(0, beta_g * p_irs(n) * p_bs(j)),
//   h_r,k  = F_R * hdd_r,k,       hdd_r,k(n) ~ CN(0, beta_r,k * p_r,k(n)),
//   h_d,k  = F_B * hdd_d,k,       hdd_d,k(j) ~ CN(0, beta_d,k * p_d,k(j)),
// all mutually independent. The cascaded covariance of diag(h_r,k) g_m is
// then C_r[k] o C_g[m] (Hadamard product).

#include "irsce/linalg.hpp"
#include "irsce/types.hpp"

#include <vector>

namespace irsce {

struct SystemDims
{
    Index M = 1; ///< BS antennas
    Index N = 1; ///< IRS elements
    Index K = 1; ///< users

    static SystemDims make(Index M, Index N, Index K)
    {
        if (M < 1 || N < 1 || K < 1)
            throw InvalidInput("SystemDims: M, N, K must all be positive");
        return SystemDims{M, N, K};
    }

    /// Reflective slots of stage I (ceil(N / M)).
    Index L1() const noexcept { return (N + M - 1) / M; }
    /// Single-sample slots of stage II.
    Index L2() const noexcept { return N - L1(); }
    /// Pilot overhead K (L1 + 1) + L2 = K + N + ceil(N/M)(K - 1).
    Index total_samples() const noexcept { return K * (L1() + 1) + L2(); }

    friend bool operator==(const SystemDims &, const SystemDims &) = default;
};

template <typename Real = double>
struct AngularBases
{
    CMatrix<Real> bs;  ///< M x M unitary DFT
    CMatrix<Real> irs; ///< N x N unitary DFT
};

template <typename Real = double>
AngularBases<Real> make_angular_bases(const SystemDims &dims)
{
    return {dft_matrix<Real>(dims.M, true), dft_matrix<Real>(dims.N, true)};
}

/// Per-link angular power profiles (strictly positive) and large-scale gains (linear power).
template <typename Real = double>
struct ChannelStatistics
{
    RVector<Real> bs_irs_irs_side; ///< N, IRS-side angular power of G
    RVector<Real> bs_irs_bs_side;  ///< M, BS-side angular power of G
    Real bs_irs_gain = 1;

    std::vector<RVector<Real>> user_irs; ///< K entries of length N
    std::vector<Real> user_irs_gain;     ///< K

    std::vector<RVector<Real>> direct; ///< K entries of length M
    std::vector<Real> direct_gain;     ///< K
};

template <typename Real = double>
RVector<Real> uniform_profile(Index size)
{
    return RVector<Real>::Ones(size);
}

/// exp(-d / spread) + floor around `center`, with d the circular index distance; normalized to unit mean.
template <typename Real = double>
RVector<Real> exponential_profile(Index size, Real center, Real spread, Real floor)
{
    if (size < 1 || !(spread > 0) || floor < 0)
        throw InvalidInput("exponential_profile: size >= 1, spread > 0, floor >= 0 required");
    RVector<Real> p(size);
    for (Index i = 0; i < size; ++i)
    {
        Real d = std::fmod(std::abs(Real(i) - center), Real(size));
        d = std::min(d, Real(size) - d);
        p(i) = std::exp(-d / spread) + floor;
    }
    return p / p.mean();
}

/// Statistics with every profile uniform and every gain equal to `gain`.
template <typename Real = double>
ChannelStatistics<Real> uniform_statistics(const SystemDims &dims, Real gain = Real(1))
{
    ChannelStatistics<Real> s;
    s.bs_irs_irs_side = uniform_profile<Real>(dims.N);
    s.bs_irs_bs_side = uniform_profile<Real>(dims.M);
    s.bs_irs_gain = gain;
    s.user_irs.assign(dims.K, uniform_profile<Real>(dims.N));
    s.user_irs_gain.assign(dims.K, gain);
    s.direct.assign(dims.K, uniform_profile<Real>(dims.M));
    s.direct_gain.assign(dims.K, gain);
    return s;
}

template <typename Real>
void validate_statistics(const SystemDims &dims, const ChannelStatistics<Real> &s)
{
    auto positive = [](const RVector<Real> &v, Index n, const char *what) {
        if (v.size() != n)
            throw InvalidInput(std::string("ChannelStatistics: wrong length for ") + what);
        if (!(v.array() > Real(0)).all() || !v.allFinite())
            throw InvalidInput(std::string("ChannelStatistics: nonpositive angular power in ") + what);
    };
    positive(s.bs_irs_irs_side, dims.N, "bs_irs_irs_side");
    positive(s.bs_irs_bs_side, dims.M, "bs_irs_bs_side");
    if (!(s.bs_irs_gain > 0))
        throw InvalidInput("ChannelStatistics: nonpositive BS-IRS gain");
    if (Index(s.user_irs.size()) != dims.K || Index(s.user_irs_gain.size()) != dims.K ||
        Index(s.direct.size()) != dims.K || Index(s.direct_gain.size()) != dims.K)
        throw InvalidInput("ChannelStatistics: per-user vectors must have K entries");
    for (Index k = 0; k < dims.K; ++k)
    {
        positive(s.user_irs[k], dims.N, "user_irs");
        positive(s.direct[k], dims.M, "direct");
        if (!(s.user_irs_gain[k] > 0) || !(s.direct_gain[k] > 0))
            throw InvalidInput("ChannelStatistics: nonpositive per-user gain");
    }
}

template <typename Real = double>
struct ChannelRealization
{
    CMatrix<Real> direct;  ///< H_d, M x K
    CMatrix<Real> bs_irs;  ///< G, N x M
    CMatrix<Real> irs_user; ///< H_r, N x K

    Index M() const { return bs_irs.cols(); }
    Index N() const { return bs_irs.rows(); }
    Index K() const { return irs_user.cols(); }
};

/// Draws one channel realization. Identical output for identical rng state.
template <typename Real>
ChannelRealization<Real> sample_channels(const SystemDims &dims, const AngularBases<Real> &bases,
                                         const ChannelStatistics<Real> &stats, Rng &rng)
{
    validate_statistics(dims, stats);
    ChannelRealization<Real> ch;

    CMatrix<Real> Gdd(dims.N, dims.M);
    for (Index j = 0; j < dims.M; ++j)
        for (Index n = 0; n < dims.N; ++n)
            Gdd(n, j) = complex_gaussian<Real>(rng, stats.bs_irs_gain * stats.bs_irs_irs_side(n) * stats.bs_irs_bs_side(j));
    ch.bs_irs = bases.irs * Gdd * bases.bs.transpose();

    CMatrix<Real> Hdd(dims.N, dims.K);
    CMatrix<Real> Ddd(dims.M, dims.K);
    for (Index k = 0; k < dims.K; ++k)
    {
        for (Index n = 0; n < dims.N; ++n)
            Hdd(n, k) = complex_gaussian<Real>(rng, stats.user_irs_gain[k] * stats.user_irs[k](n));
        for (Index j = 0; j < dims.M; ++j)
            Ddd(j, k) = complex_gaussian<Real>(rng, stats.direct_gain[k] * stats.direct[k](j));
    }
    ch.irs_user = bases.irs * Hdd;
    ch.direct = bases.bs * Ddd;
    return ch;
}

template <typename Real>
ChannelRealization<Real> sample_channels(const SystemDims &dims, const AngularBases<Real> &bases,
                                         const ChannelStatistics<Real> &stats, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_channels(dims, bases, stats, rng);
}

/// G^T diag(h_r,k): the M x N cascaded channel of one user.
template <typename Real>
CMatrix<Real> cascaded_channel(const CMatrix<Real> &bs_irs, const CVector<Real> &irs_user)
{
    if (bs_irs.rows() != irs_user.size())
        throw InvalidInput("cascaded_channel: G must be N x M and h_r must have N entries");
    return bs_irs.transpose() * irs_user.asDiagonal();
}

/// All K cascaded channels of a realization.
template <typename Real>
std::vector<CMatrix<Real>> cascaded_channels(const ChannelRealization<Real> &ch)
{
    std::vector<CMatrix<Real>> out;
    out.reserve(ch.K());
    for (Index k = 0; k < ch.K(); ++k)
        out.push_back(cascaded_channel<Real>(ch.bs_irs, ch.irs_user.col(k)));
    return out;
}

/// Covariance of diag(h_r,k) g_m: the elementwise product C_r[k] o C_g[m].
template <typename Real>
CMatrix<Real> cascaded_covariance(const CMatrix<Real> &cov_g, const CMatrix<Real> &cov_r)
{
    if (cov_g.rows() != cov_g.cols() || cov_g.rows() != cov_r.rows() || cov_g.cols() != cov_r.cols())
        throw InvalidInput("cascaded_covariance: both covariances must be N x N");
    return cov_r.cwiseProduct(cov_g);
}

/// Sample covariance (1/J) sum_j h_j h_j^H of the columns of `samples`.
template <typename Real>
CMatrix<Real> estimate_covariance_from_samples(const CMatrix<Real> &samples)
{
    if (samples.cols() < 1)
        throw InvalidInput("estimate_covariance_from_samples: at least one sample required");
    CMatrix<Real> C = samples * samples.adjoint() / Real(samples.cols());
    return hermitian_part(C);
}

template <typename Real = double>
struct CovarianceSet
{
    Index M = 0, N = 0, K = 0;
    std::vector<CMatrix<Real>> bs_irs;    ///< C_g[m], M entries (N x N)
    std::vector<CMatrix<Real>> irs_user;  ///< C_r[k], K entries (N x N)
    std::vector<CMatrix<Real>> cascaded_; ///< C_m^(k) at index m * K + k
    std::vector<CMatrix<Real>> direct;    ///< C_d[k], K entries (M x M)

    const CMatrix<Real> &cascaded(Index m, Index k) const { return cascaded_[static_cast<std::size_t>(m * K + k)]; }
    CMatrix<Real> &cascaded(Index m, Index k) { return cascaded_[static_cast<std::size_t>(m * K + k)]; }

    /// Mean per-element cascaded power, trace(C_m^(k)) / N averaged over (m, k).
    Real mean_cascaded_power() const
    {
        Real acc = 0;
        for (const auto &C : cascaded_)
            acc += C.trace().real();
        return acc / Real(N * static_cast<Index>(cascaded_.size()));
    }
};

/// Closed-form covariances implied by the angular model.
template <typename Real>
CovarianceSet<Real> model_covariances(const SystemDims &dims, const AngularBases<Real> &bases,
                                      const ChannelStatistics<Real> &stats)
{
    validate_statistics(dims, stats);
    CovarianceSet<Real> cs;
    cs.M = dims.M;
    cs.N = dims.N;
    cs.K = dims.K;

    const RVector<Real> bs_power = stats.bs_irs_bs_side;
    for (Index m = 0; m < dims.M; ++m)
    {
        // g_m = F_R * sum_j Gdd(:, j) F_B(m, j)
        const Real w = (bases.bs.row(m).cwiseAbs2().transpose().cwiseProduct(bs_power)).sum();
        const RVector<Real> diag = stats.bs_irs_gain * w * stats.bs_irs_irs_side;
        cs.bs_irs.push_back(hermitian_part<Real>(bases.irs * diag.template cast<Complex<Real>>().asDiagonal() * bases.irs.adjoint()));
    }
    for (Index k = 0; k < dims.K; ++k)
    {
        const RVector<Real> dr = stats.user_irs_gain[k] * stats.user_irs[k];
        cs.irs_user.push_back(hermitian_part<Real>(bases.irs * dr.template cast<Complex<Real>>().asDiagonal() * bases.irs.adjoint()));
        const RVector<Real> dd = stats.direct_gain[k] * stats.direct[k];
        cs.direct.push_back(hermitian_part<Real>(bases.bs * dd.template cast<Complex<Real>>().asDiagonal() * bases.bs.adjoint()));
    }
    cs.cascaded_.resize(static_cast<std::size_t>(dims.M * dims.K));
    for (Index m = 0; m < dims.M; ++m)
        for (Index k = 0; k < dims.K; ++k)
            cs.cascaded(m, k) = cascaded_covariance<Real>(cs.bs_irs[m], cs.irs_user[k]);
    return cs;
}

/// Checks Hermitian symmetry, PSD-ness (eigenvalues >= -1e-10 trace/N) and
/// full rank of every cascaded covariance (min eigenvalue > rank_tol * max).
/// Throws InvalidInput naming the offending matrix.
template <typename Real>
void validate_covariances(const CovarianceSet<Real> &cs, Real rank_tol = Real(1e-9))
{
    auto check_psd = [](const CMatrix<Real> &C, const std::string &name) -> RVector<Real> {
        if (!is_hermitian(C, Real(1e-12)))
            throw InvalidInput(name + " is not Hermitian");
        RVector<Real> ev = hermitian_eigenvalues(C);
        const Real slack = Real(1e-10) * std::abs(C.trace().real()) / Real(C.rows());
        if (ev.minCoeff() < -slack)
            throw InvalidInput(name + " is not positive semidefinite");
        return ev;
    };
    if (Index(cs.cascaded_.size()) != cs.M * cs.K)
        throw InvalidInput("CovarianceSet: expected M*K cascaded covariances");
    for (Index m = 0; m < cs.M; ++m)
        for (Index k = 0; k < cs.K; ++k)
        {
            const std::string name = "C_cascaded[" + std::to_string(m) + "][" + std::to_string(k) + "]";
            const auto &C = cs.cascaded(m, k);
            if (C.rows() != cs.N || C.cols() != cs.N)
                throw InvalidInput(name + " has wrong shape");
            RVector<Real> ev = check_psd(C, name);
            if (!(ev.minCoeff() > rank_tol * ev.maxCoeff()))
                throw InvalidInput(name + " is rank deficient");
        }
    for (std::size_t k = 0; k < cs.direct.size(); ++k)
        check_psd(cs.direct[k], "C_d[" + std::to_string(k) + "]");
}

} // namespace irsce

#endif // IRSCE_MODEL_HPP
