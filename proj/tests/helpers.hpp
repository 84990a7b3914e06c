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


#ifndef IRSCE_TESTS_HELPERS_HPP
#define IRSCE_TESTS_HELPERS_HPP

#include "irsce/map_estimator.hpp"
#include "irsce/model.hpp"
#include "irsce/protocol.hpp"

#include <string>
#include <vector>

namespace irsce::test {

/// Random Hermitian positive definite matrix A A^H + shift I.
inline CMatrix<double> random_hpd(Rng &rng, Index n, double shift = 0.1)
{
    const CMatrix<double> A = complex_gaussian_matrix<double>(rng, n, n, 1.0);
    CMatrix<double> C = A * A.adjoint();
    C.diagonal().array() += shift;
    return hermitian_part(C);
}

/// Angular statistics with distinct, randomly placed exponential profiles.
inline ChannelStatistics<double> random_statistics(Rng &rng, const SystemDims &d, double gain = 1.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ChannelStatistics<double> s;
    s.bs_irs_irs_side = exponential_profile<double>(d.N, u(rng) * double(d.N), 1.5, 0.05);
    s.bs_irs_bs_side = exponential_profile<double>(d.M, u(rng) * double(d.M), 1.0, 0.05);
    s.bs_irs_gain = gain;
    for (Index k = 0; k < d.K; ++k)
    {
        s.user_irs.push_back(exponential_profile<double>(d.N, u(rng) * double(d.N), 2.0, 0.05));
        s.user_irs_gain.push_back(gain * (0.5 + u(rng)));
        s.direct.push_back(exponential_profile<double>(d.M, u(rng) * double(d.M), 1.0, 0.05));
        s.direct_gain.push_back(gain * (0.5 + u(rng)));
    }
    return s;
}

/// One fully specified noisy instance of the proposed protocol.
struct Instance
{
    SystemDims dims;
    AngularBases<double> bases;
    ChannelStatistics<double> stats;
    CovarianceSet<double> cov;
    PilotMatrix<double> pilots;
    PhasePlan<double> plan;
    ChannelRealization<double> channel;
    TrainingRecord<double> record;
    Observations<double> obs;
};

inline Instance make_instance(const SystemDims &d, double noise_variance, std::uint64_t seed, bool random_vartheta = true)
{
    Rng rng(seed);
    Instance in;
    in.dims = d;
    in.bases = make_angular_bases<double>(d);
    in.stats = random_statistics(rng, d);
    in.cov = model_covariances(d, in.bases, in.stats);
    in.pilots = build_pilots<double>(d.K);
    in.plan = build_phase_plan(random_vartheta ? random_unit_modulus<double>(rng, d.N) : CVector<double>(CVector<double>::Ones(d.N)));
    in.channel = sample_channels(d, in.bases, in.stats, rng);
    in.record = simulate_training(in.channel, in.plan, in.pilots, noise_variance, rng);
    in.obs = preprocess(in.record, in.pilots);
    return in;
}

inline double rel_diff(const CMatrix<double> &a, const CMatrix<double> &b)
{
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

/// Captures warnings for the lifetime of the object.
class WarningCapture
{
  public:
    WarningCapture()
    {
        set_warning_handler([this](std::string_view m) { messages.emplace_back(m); });
    }
    ~WarningCapture() { set_warning_handler(nullptr); }
    std::vector<std::string> messages;
};

} // namespace irsce::test

#endif // IRSCE_TESTS_HELPERS_HPP
