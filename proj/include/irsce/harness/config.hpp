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

#ifndef IRSCE_HARNESS_CONFIG_HPP
#define IRSCE_HARNESS_CONFIG_HPP

#include "irsce/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsce::harness {

/// Parse or validation failure; `line()` is 0 for validation errors.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(const std::string &msg, int line = 0) : std::runtime_error(msg), line_(line) {}
    int line() const noexcept { return line_; }

  private:
    int line_;
};

enum class Scheme
{
    proposed,
    proposed_random_vartheta,
    onoff,
};

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string &name);

struct Point3
{
    double x = 0, y = 0, z = 0;
};

struct ExperimentConfig
{
    SystemDims dims = SystemDims::make(4, 16, 4);
    std::vector<double> power_dbm = {0.0, 10.0, 20.0};

    // noise: sigma0^2 = 10^((psd + 10 lg B) / 10) mW unless noise_power_mw is given
    double noise_psd_dbm_hz = -170.0;
    double bandwidth_hz = 200e3;
    std::optional<double> noise_power_mw;

    // path loss in dB: a + b lg d (+ penetration for the direct link)
    double pl_reflect_a = 40.0;
    double pl_reflect_b = 17.3;
    double pl_direct_a = 30.0;
    double pl_direct_b = 31.9;
    double penetration_db = 20.0;
    double reflection_efficiency = 0.8; ///< power factor absorbed into the BS-IRS gain

    // geometry preset (metres)
    Point3 bs{0.0, 0.0, 3.0};
    Point3 irs{0.0, 10.0, 3.0};
    double user_height = 1.5;
    double user_area_x0 = 0.0;
    double user_area_y0 = 2.5;
    double user_area_size = 5.0;
    std::uint64_t geometry_seed = 7;

    // angular power profiles
    std::string angular_profile = "exponential"; ///< exponential | uniform
    double angular_spread = 1.0;                 ///< in DFT bins
    double angular_floor = 0.02;

    int trials = 200;
    std::uint64_t seed = 1;
    std::vector<Scheme> schemes = {Scheme::proposed, Scheme::proposed_random_vartheta, Scheme::onoff};
    bool phase_opt = true;
    int sca_max_iters = 200;
    double sca_tol = 1e-8;

    int max_iters = 20;
    double tol = 1e-6;
    bool use_prior = true;

    std::string onoff_estimator = "lmmse"; ///< lmmse | ls
    int onoff_cov_draws = 2000;

    int threads = 1;
    std::string output = "results.csv";

    /// sigma0^2 in mW.
    double noise_power() const;
    void validate() const;
};

/// Parses `key = value` lines (`#` starts a comment); missing keys keep their defaults.
ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::string &path);

} // namespace irsce::harness

#endif // IRSCE_HARNESS_CONFIG_HPP
