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

#ifndef IRSCE_HARNESS_EXPERIMENT_HPP
#define IRSCE_HARNESS_EXPERIMENT_HPP

#include "irsce/baseline_onoff.hpp"
#include "irsce/harness/config.hpp"
#include "irsce/map_estimator.hpp"
#include "irsce/model.hpp"
#include "irsce/phase_opt.hpp"
#include "irsce/protocol.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace irsce::harness {

/// Fixed large-scale setting of one experiment: user drop, link statistics and covariances.
struct Scenario
{
    SystemDims dims;
    AngularBases<double> bases;
    ChannelStatistics<double> stats;
    CovarianceSet<double> cov;
    std::vector<Point3> users;
    std::vector<CMatrix<double>> relative_cov; ///< covariance of h_u,k for k = 2..K (lmmse on-off only)
};

Scenario build_scenario(const ExperimentConfig &cfg);

/// Steering direction maximizing the stage-I reflected power (all ones when phase_opt is off).
SteeringResult<double> design_steering(const Scenario &sc, const ExperimentConfig &cfg);

struct TrialOutcome
{
    double nmse = 0;
    int iterations = 0;
    bool failed = false;
};

/// One Monte-Carlo trial. `vartheta` is used by the proposed scheme; the random-vartheta
/// scheme draws its own from the trial stream.
TrialOutcome run_trial(const Scenario &sc, const ExperimentConfig &cfg, Scheme scheme, const CVector<double> &vartheta,
                       double noise_variance, std::uint64_t seed);

struct ResultRow
{
    std::string scheme;
    double power_dbm = 0;
    Index M = 0, N = 0, K = 0;
    int trials = 0;
    int failed = 0;
    double nmse = 0;    ///< mean of retained per-trial NMSE
    double nmse_db = 0;
    double std_err = 0; ///< standard error of the mean
    double mean_iters = 0;
    double wall_time_s = 0;
};

struct CellResult
{
    ResultRow row;
    std::vector<double> per_trial; ///< NaN marks a failed trial
};

/// Runs `cfg.trials` trials of one (scheme, power) cell. Trial i draws from
/// derive_seed(cfg.seed, stream_tag, power_index, i), so results do not depend on `threads`.
CellResult run_cell(const Scenario &sc, const ExperimentConfig &cfg, Scheme scheme, std::size_t power_index,
                    const CVector<double> &vartheta, std::uint64_t stream_tag, int threads);

std::uint64_t scheme_stream(Scheme s);

/// All (scheme, power) cells in config order.
std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg, int threads);

/// %.17g formatting used throughout the CSV output.
std::string format_double(double x);

/// Writes `schema=1`, the column header and one line per row.
void write_csv(std::ostream &os, const std::vector<ResultRow> &rows, bool timing = false);

/// Runs fn(i) for i in [0, count) on `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &fn);

} // namespace irsce::harness

#endif // IRSCE_HARNESS_EXPERIMENT_HPP
