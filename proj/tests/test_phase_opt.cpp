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
#include "oracles.hpp"

#include "irsce/phase_opt.hpp"

#include <doctest.h>

using namespace irsce;
using irsce::test::exhaustive_quantized;

namespace {

/// sum_{l<=L1, k, m} E|h_I,k,m^T theta_l|^2 = sum theta_l^H conj(C_m^(k)) theta_l, evaluated per term.
double received_power_oracle(const CovarianceSet<double> &cov, const CVector<double> &vartheta, Index L1)
{
    const CMatrix<double> F = dft_matrix<double>(cov.N, false);
    double total = 0;
    for (Index l = 0; l < L1; ++l)
    {
        const CVector<double> theta = vartheta.cwiseProduct(F.col(l));
        for (Index m = 0; m < cov.M; ++m)
            for (Index k = 0; k < cov.K; ++k)
                total += (theta.adjoint() * cov.cascaded(m, k).conjugate() * theta)(0, 0).real();
    }
    return total;
}

} // namespace

TEST_CASE("gain matrix reproduces the expected received power")
{
    Rng rng(1);
    const auto d = SystemDims::make(3, 8, 2);
    const auto stats = test::random_statistics(rng, d);
    const auto cov = model_covariances(d, make_angular_bases<double>(d), stats);
    const CMatrix<double> E = build_gain_matrix(cov, dft_matrix<double>(d.N, false), d.L1());
    CHECK(is_hermitian(E, 1e-12));
    for (int t = 0; t < 10; ++t)
    {
        const CVector<double> v = random_unit_modulus<double>(rng, d.N);
        const double f = eval_fB(v, E);
        CHECK(f == doctest::Approx(received_power_oracle(cov, v, d.L1())).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_gain_matrix(cov, dft_matrix<double>(d.N, false), 0), InvalidInput);
}

TEST_CASE("surrogate is a tangent minorant")
{
    Rng rng(2);
    const CMatrix<double> E = test::random_hpd(rng, 6);
    const CVector<double> a = random_unit_modulus<double>(rng, 6);
    CHECK(surrogate_fB(a, a, E) == doctest::Approx(eval_fB(a, E)));
    for (int t = 0; t < 50; ++t)
    {
        const CVector<double> v = random_unit_modulus<double>(rng, 6);
        CHECK(surrogate_fB(v, a, E) <= eval_fB(v, E) + 1e-12);
    }
    const CVector<double> next = sca_step(a, E);
    for (int t = 0; t < 50; ++t)
        CHECK(surrogate_fB(random_unit_modulus<double>(rng, 6), a, E) <= surrogate_fB(next, a, E) + 1e-12);
}

TEST_CASE("rank-one gain matrix")
{
    Rng rng(3);
    const Index N = 8;
    const CVector<double> w = complex_gaussian_matrix<double>(rng, N, 1, 1.0);
    const CMatrix<double> E = w * w.adjoint();
    const double best = std::pow(w.cwiseAbs().sum(), 2);
    for (int t = 0; t < 5; ++t)
    {
        const auto r = optimize_steering<double>(E, random_unit_modulus<double>(rng, N));
        CHECK(std::abs(r.trajectory.back() - best) < 1e-8 * best);
        // optimum is exp(j(angle(w) + c))
        const std::complex<double> c = r.vartheta(0) / (w(0) / std::abs(w(0)));
        for (Index n = 0; n < N; ++n)
            CHECK(std::abs(r.vartheta(n) - c * w(n) / std::abs(w(n))) < 1e-6);
    }
    // the all-ones vector with w = ones is already optimal: f_B = N^2
    const CMatrix<double> J = CMatrix<double>::Ones(N, N);
    CHECK(optimize_steering<double>(J).trajectory.back() == doctest::Approx(double(N * N)));
}

TEST_CASE("trajectory is monotone and iterates stay on the unit circle")
{
    Rng rng(4);
    for (int t = 0; t < 20; ++t)
    {
        const Index N = 4 + t % 13;
        const CMatrix<double> E = test::random_hpd(rng, N);
        const auto r = optimize_steering<double>(E, random_unit_modulus<double>(rng, N), 1e-12, 500);
        for (std::size_t i = 1; i < r.trajectory.size(); ++i)
            CHECK(r.trajectory[i] >= r.trajectory[i - 1] * (1 - 1e-12));
        CHECK(is_unit_modulus<double>(r.vartheta, 1e-12));
        CHECK(r.trajectory.size() == std::size_t(r.iterations) + 1);
    }
}

TEST_CASE("random probes never beat the optimized steering by much")
{
    Rng rng(5);
    const CMatrix<double> E = test::random_hpd(rng, 10);
    const double f = optimize_steering<double>(E).trajectory.back();
    for (int t = 0; t < 2000; ++t)
        CHECK(eval_fB(random_unit_modulus<double>(rng, 10), E) <= f * 1.02);
}

TEST_CASE("close to the best 16-level quantized steering for small N")
{
    Rng rng(6);
    for (Index N : {2, 3, 4, 5})
    {
        const CMatrix<double> E = test::random_hpd(rng, N, 0.0);
        const double q = exhaustive_quantized(E, 16);
        CHECK(optimize_steering<double>(E).trajectory.back() >= 0.98 * q);
    }
}

TEST_CASE("scaling E leaves the steering unchanged")
{
    Rng rng(7);
    const CMatrix<double> E = test::random_hpd(rng, 7);
    const auto a = optimize_steering<double>(E);
    const auto b = optimize_steering<double>(CMatrix<double>(E * 1e-9));
    CHECK((a.vartheta - b.vartheta).norm() < 1e-9);
    CHECK(b.trajectory.back() == doctest::Approx(a.trajectory.back() * 1e-9));
}

TEST_CASE("principal start and input checks")
{
    CMatrix<double> E = CMatrix<double>::Zero(3, 3);
    E(1, 1) = 1.0;
    const CVector<double> s = principal_phase_start(E);
    CHECK(is_unit_modulus<double>(s, 1e-12));
    CHECK_THROWS_AS(optimize_steering<double>(E, CVector<double>(CVector<double>::Ones(2))), InvalidInput);
    CVector<double> bad = CVector<double>::Ones(3);
    bad(0) = 2.0;
    CHECK_THROWS_AS(optimize_steering<double>(E, bad), InvalidInput);
    // a zero entry of E vartheta keeps the previous phase
    const CVector<double> a = CVector<double>::Constant(3, std::polar(1.0, 0.3));
    const CVector<double> next = sca_step(a, E);
    CHECK(std::abs(next(0) - a(0)) < 1e-15);
    CHECK(std::abs(next(1) - a(1)) < 1e-12);
}
