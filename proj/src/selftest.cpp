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

#include "irsce/harness/selftest.hpp"

#include "irsce/baseline_onoff.hpp"
#include "irsce/map_estimator.hpp"
#include "irsce/model.hpp"
#include "irsce/phase_opt.hpp"
#include "irsce/protocol.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <string>

namespace irsce::harness {

namespace {

bool sample_counts()
{
    const struct
    {
        Index M, N, K, T;
    } cases[] = {{8, 32, 8, 68}, {2, 4, 2, 8}, {4, 16, 4, 32}};
    for (const auto &c : cases)
    {
        const auto d = SystemDims::make(c.M, c.N, c.K);
        if (d.total_samples() != c.T || Index(sample_layout(d).size()) != c.T)
            return false;
    }
    return true;
}

bool phase_plan_trace()
{
    Rng rng(11);
    for (Index N : {4, 16, 64})
    {
        const auto plan = build_phase_plan(random_unit_modulus<double>(rng, N));
        const CMatrix<double> P = plan.phase_matrix();
        const CMatrix<double> G = P * P.adjoint();
        if (std::abs(hermitian_inverse<double>(G).trace().real() - 1.0) > 1e-10)
            return false;
    }
    return true;
}

bool exact_recovery()
{
    const auto d = SystemDims::make(2, 4, 2);
    const auto bases = make_angular_bases<double>(d);
    const auto stats = uniform_statistics<double>(d);
    const auto cov = model_covariances(d, bases, stats);
    const auto pilots = build_pilots<double>(d.K);
    Rng rng(5);
    for (int t = 0; t < 10; ++t)
    {
        const auto plan = build_phase_plan(random_unit_modulus<double>(rng, d.N));
        const auto ch = sample_channels(d, bases, stats, rng);
        const auto rec = simulate_training(ch, plan, pilots, 0.0, rng);
        const auto p = make_map_problem(preprocess(rec, pilots), plan, cov);
        if (!(nmse(estimate(p).cascaded, cascaded_channels(ch)) < 1e-10))
            return false;
    }
    return true;
}

bool monotone_objective()
{
    const auto d = SystemDims::make(4, 16, 4);
    const auto bases = make_angular_bases<double>(d);
    const auto stats = uniform_statistics<double>(d);
    const auto cov = model_covariances(d, bases, stats);
    const auto pilots = build_pilots<double>(d.K);
    Rng rng(9);
    for (int t = 0; t < 5; ++t)
    {
        const auto plan = build_phase_plan(random_unit_modulus<double>(rng, d.N));
        const auto ch = sample_channels(d, bases, stats, rng);
        const auto rec = simulate_training(ch, plan, pilots, 0.1, rng);
        const auto res = estimate(make_map_problem(preprocess(rec, pilots), plan, cov));
        const auto &f = res.state.step_trajectory;
        for (std::size_t i = 1; i < f.size(); ++i)
            if (f[i] < f[i - 1] - 1e-9 * std::max(1.0, std::abs(f[i - 1])))
                return false;
    }
    return true;
}

bool steering_monotone()
{
    Rng rng(3);
    const CMatrix<double> A = complex_gaussian_matrix<double>(rng, 8, 8, 1.0);
    const CMatrix<double> E = A * A.adjoint();
    const auto r = optimize_steering<double>(E);
    for (std::size_t i = 1; i < r.trajectory.size(); ++i)
        if (r.trajectory[i] < r.trajectory[i - 1] - 1e-9 * std::abs(r.trajectory[i - 1]))
            return false;
    return is_unit_modulus<double>(r.vartheta, 1e-12);
}

bool onoff_exact()
{
    const auto d = SystemDims::make(2, 4, 3);
    const auto bases = make_angular_bases<double>(d);
    const auto stats = uniform_statistics<double>(d);
    const auto pilots = build_pilots<double>(d.K);
    const auto plan = make_onoff_plan<double>(d);
    Rng rng(21);
    const auto ch = sample_channels(d, bases, stats, rng);
    const auto rec = simulate_onoff(ch, plan, pilots, 0.0, rng);
    if (rec.sample_count() != plan.total_samples())
        return false;
    return nmse(estimate_onoff(rec, plan, ch.direct), cascaded_channels(ch)) < 1e-10;
}

} // namespace

int run_selftest(std::ostream &os)
{
    const struct
    {
        const char *name;
        std::function<bool()> check;
    } checks[] = {
        {"sample counts", sample_counts},
        {"phase plan trace", phase_plan_trace},
        {"noiseless recovery", exact_recovery},
        {"objective monotone", monotone_objective},
        {"steering monotone", steering_monotone},
        {"on-off noiseless recovery", onoff_exact},
    };
    int failures = 0;
    for (const auto &c : checks)
    {
        bool ok = false;
        std::string note;
        try
        {
            ok = c.check();
        }
        catch (const std::exception &e)
        {
            note = std::string(" (") + e.what() + ")";
        }
        os << (ok ? "ok   " : "FAIL ") << c.name << note << '\n';
        failures += ok ? 0 : 1;
    }
    return failures;
}

} // namespace irsce::harness
