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

#include "helpers.hpp"

#include "irsce/baseline_onoff.hpp"
#include "irsce/map_estimator.hpp"

#include <doctest.h>

using namespace irsce;

namespace {

struct OnOffCase
{
    SystemDims dims;
    AngularBases<double> bases;
    ChannelStatistics<double> stats;
    PilotMatrix<double> pilots;
    OnOffPlan<double> plan;
};

OnOffCase make_case(const SystemDims &d, std::uint64_t seed)
{
    Rng rng(seed);
    OnOffCase c{d, make_angular_bases<double>(d), test::random_statistics(rng, d), build_pilots<double>(d.K),
                make_onoff_plan<double>(d)};
    return c;
}

} // namespace

TEST_CASE("plan accounting")
{
    const struct
    {
        Index M, N, K, blocks;
    } cases[] = {{8, 32, 8, 4}, {2, 4, 2, 2}, {4, 16, 4, 4}, {3, 7, 3, 3}, {8, 4, 2, 1}};
    for (const auto &c : cases)
    {
        const auto d = SystemDims::make(c.M, c.N, c.K);
        const auto plan = make_onoff_plan<double>(d);
        CHECK(plan.blocks() == c.blocks);
        CHECK(plan.total_samples() == d.K + d.N + c.blocks * (d.K - 1));
        CHECK(plan.total_samples() == d.total_samples());
        RVector<double> coverage = RVector<double>::Zero(d.N);
        for (Index b = 0; b < plan.blocks(); ++b)
        {
            coverage += plan.masks[std::size_t(b)];
            CHECK(plan.block_length[std::size_t(b)] <= d.M);
            CHECK(plan.reflection_fraction(b) == doctest::Approx(double(plan.block_length[std::size_t(b)]) / double(d.N)));
        }
        CHECK((coverage.array() == 1.0).all());
        const CMatrix<double> P = plan.reference_phases;
        CHECK(hermitian_inverse<double>(P * P.adjoint()).trace().real() == doctest::Approx(1.0));
    }
}

TEST_CASE("simulated record has the planned size")
{
    const auto c = make_case(SystemDims::make(3, 7, 3), 1);
    Rng rng(2);
    const auto ch = sample_channels(c.dims, c.bases, c.stats, rng);
    const auto rec = simulate_onoff(ch, c.plan, c.pilots, 0.1, rng);
    CHECK(rec.sample_count() == c.plan.total_samples());
    CHECK(rec.stage1.cols() == 3);
    CHECK(rec.stage2.cols() == 7);
    CHECK(rec.stage3.size() == 2);
    CHECK(rec.stage3[0].cols() == 3);
}

TEST_CASE("noiseless baseline recovers every cascaded channel")
{
    for (const auto &d : {SystemDims::make(2, 4, 2), SystemDims::make(3, 7, 3), SystemDims::make(4, 16, 4)})
        for (std::uint64_t seed = 10; seed < 13; ++seed)
        {
            const auto c = make_case(d, seed);
            Rng rng(seed);
            const auto ch = sample_channels(c.dims, c.bases, c.stats, rng);
            const auto rec = simulate_onoff(ch, c.plan, c.pilots, 0.0, rng);
            CHECK(nmse(estimate_onoff(rec, c.plan, ch.direct), cascaded_channels(ch)) < 1e-10);
            CHECK((estimate_direct_onoff(rec, c.pilots) - ch.direct).norm() < 1e-12 * ch.direct.norm());
        }
}

TEST_CASE("reference estimate error matches the LS noise level")
{
    const auto c = make_case(SystemDims::make(2, 8, 2), 20);
    Rng rng(21);
    const auto ch = sample_channels(c.dims, c.bases, c.stats, rng);
    const CMatrix<double> H1 = cascaded_channel<double>(ch.bs_irs, ch.irs_user.col(0));
    const double s2 = 0.01;
    double err = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t)
    {
        const auto rec = simulate_onoff(ch, c.plan, c.pilots, s2, rng);
        const CMatrix<double> Y = rec.stage2.colwise() - ch.direct.col(0);
        err += (estimate_reference<double>(Y, c.plan.reference_phases) - H1).squaredNorm();
    }
    // per row: s2 * trace((Phi Phi^H)^{-1}) = s2
    CHECK(err / trials / double(c.dims.M) == doctest::Approx(s2).epsilon(0.05));
}

TEST_CASE("error grows with the noise level")
{
    const auto c = make_case(SystemDims::make(2, 6, 3), 30);
    double previous = 0;
    for (double s2 : {1e-8, 1e-6, 1e-4, 1e-2})
    {
        Rng rng(31);
        double acc = 0;
        for (int t = 0; t < 200; ++t)
        {
            const auto ch = sample_channels(c.dims, c.bases, c.stats, rng);
            const auto rec = simulate_onoff(ch, c.plan, c.pilots, s2, rng);
            acc += nmse(estimate_onoff(rec, c.plan, ch.direct), cascaded_channels(ch));
        }
        CHECK(acc > previous);
        previous = acc;
    }
}

TEST_CASE("lmmse relative estimate")
{
    const auto c = make_case(SystemDims::make(2, 4, 2), 40);
    Rng rng(41);
    const auto ch = sample_channels(c.dims, c.bases, c.stats, rng);
    const auto rec = simulate_onoff(ch, c.plan, c.pilots, 0.0, rng);
    const CMatrix<double> ref = cascaded_channel<double>(ch.bs_irs, ch.irs_user.col(0));
    const CMatrix<double> Y3 = rec.stage3[0].colwise() - ch.direct.col(1);
    const CVector<double> truth = ch.irs_user.col(1).cwiseQuotient(ch.irs_user.col(0));
    RelativeOptions<double> opt{RelativeEstimator::lmmse, CMatrix<double>::Identity(4, 4), 0.0};
    CHECK((estimate_relative<double>(Y3, ref, c.plan, opt) - truth).norm() < 1e-8 * truth.norm());
    // infinite noise shrinks to zero
    opt.noise_variance = 1e12;
    CHECK(estimate_relative<double>(Y3, ref, c.plan, opt).norm() < 1e-6 * truth.norm());
    opt.covariance = CMatrix<double>::Identity(3, 3);
    CHECK_THROWS_AS(estimate_relative<double>(Y3, ref, c.plan, opt), InvalidInput);
}

TEST_CASE("singular reference block falls back with a warning")
{
    const auto c = make_case(SystemDims::make(2, 4, 2), 50);
    CMatrix<double> ref = CMatrix<double>::Ones(2, 4);
    const CMatrix<double> y = CMatrix<double>::Ones(2, 2);
    test::WarningCapture cap;
    const CVector<double> hu = estimate_relative<double>(y, ref, c.plan);
    CHECK(hu.allFinite());
    CHECK(cap.messages.size() == 2);
}

TEST_CASE("relative channel covariance")
{
    const auto d = SystemDims::make(2, 4, 3);
    const auto bases = make_angular_bases<double>(d);
    const auto stats = uniform_statistics<double>(d);
    Rng rng(60);
    const CMatrix<double> C = relative_channel_covariance(d, bases, stats, 1, 500, rng);
    CHECK(is_hermitian(C, 1e-12));
    CHECK(hermitian_eigenvalues<double>(C).minCoeff() > 0);
    CHECK_THROWS_AS(relative_channel_covariance(d, bases, stats, 0, 10, rng), InvalidInput);
    CHECK_THROWS_AS(relative_channel_covariance(d, bases, stats, 3, 10, rng), InvalidInput);
}

TEST_CASE("option list must cover every non-reference user")
{
    const auto c = make_case(SystemDims::make(2, 4, 3), 70);
    Rng rng(71);
    const auto ch = sample_channels(c.dims, c.bases, c.stats, rng);
    const auto rec = simulate_onoff(ch, c.plan, c.pilots, 0.0, rng);
    std::vector<RelativeOptions<double>> one(1);
    CHECK_THROWS_AS(estimate_onoff(rec, c.plan, ch.direct, one), InvalidInput);
}
