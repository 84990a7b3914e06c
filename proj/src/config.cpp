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

#include "irsce/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace irsce::harness {

std::string scheme_name(Scheme s)
{
    switch (s)
    {
    case Scheme::proposed:
        return "proposed";
    case Scheme::proposed_random_vartheta:
        return "proposed_random_vartheta";
    case Scheme::onoff:
        return "onoff";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string &name)
{
    if (name == "proposed")
        return Scheme::proposed;
    if (name == "proposed_random_vartheta")
        return Scheme::proposed_random_vartheta;
    if (name == "onoff")
        return Scheme::onoff;
    throw ConfigError("unknown scheme '" + name + "'");
}

double ExperimentConfig::noise_power() const
{
    if (noise_power_mw)
        return *noise_power_mw;
    return std::pow(10.0, (noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz)) / 10.0);
}

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string &field, const std::string &why) { throw ConfigError(field + ": " + why); };
    if (dims.M < 1 || dims.N < 1 || dims.K < 1)
        fail("M/N/K", "must be positive");
    if (power_dbm.empty())
        fail("power_dbm", "needs at least one value");
    if (trials < 1)
        fail("trials", "must be >= 1");
    if (schemes.empty())
        fail("schemes", "needs at least one scheme");
    if (!(bandwidth_hz > 0))
        fail("bandwidth_hz", "must be > 0");
    if (noise_power_mw && *noise_power_mw < 0)
        fail("noise_power_mw", "must be >= 0");
    if (!(reflection_efficiency > 0) || reflection_efficiency > 1)
        fail("reflection_efficiency", "must be in (0, 1]");
    if (angular_profile != "exponential" && angular_profile != "uniform")
        fail("angular_profile", "must be 'exponential' or 'uniform'");
    if (!(angular_spread > 0))
        fail("angular_spread", "must be > 0");
    if (angular_floor < 0)
        fail("angular_floor", "must be >= 0");
    if (angular_profile == "exponential" && !(angular_floor > 0))
        fail("angular_floor", "must be > 0 so that every covariance is full rank");
    if (!(user_area_size > 0))
        fail("user_area_size", "must be > 0");
    if (max_iters < 1)
        fail("max_iters", "must be >= 1");
    if (!(tol > 0))
        fail("tol", "must be > 0");
    if (sca_max_iters < 1 || !(sca_tol > 0))
        fail("sca", "sca_max_iters >= 1 and sca_tol > 0 required");
    if (onoff_estimator != "ls" && onoff_estimator != "lmmse")
        fail("onoff_estimator", "must be 'ls' or 'lmmse'");
    if (onoff_cov_draws < 1)
        fail("onoff_cov_draws", "must be >= 1");
    if (threads < 1)
        fail("threads", "must be >= 1");
}

namespace {

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double to_double(const std::string &v, int line, const std::string &key)
{
    std::size_t pos = 0;
    double x = 0;
    try
    {
        x = std::stod(v, &pos);
    }
    catch (const std::exception &)
    {
        pos = 0;
    }
    if (pos != v.size() || v.empty())
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a number, got '" + v + "'", line);
    return x;
}

long long to_int(const std::string &v, int line, const std::string &key)
{
    std::size_t pos = 0;
    long long x = 0;
    try
    {
        x = std::stoll(v, &pos);
    }
    catch (const std::exception &)
    {
        pos = 0;
    }
    if (pos != v.size() || v.empty())
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects an integer, got '" + v + "'", line);
    return x;
}

std::uint64_t to_u64(const std::string &v, int line, const std::string &key)
{
    std::size_t pos = 0;
    unsigned long long x = 0;
    try
    {
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument("negative");
        x = std::stoull(v, &pos);
    }
    catch (const std::exception &)
    {
        pos = 0;
    }
    if (pos != v.size() || v.empty())
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects an unsigned integer, got '" + v + "'", line);
    return x;
}

bool to_bool(const std::string &v, int line, const std::string &key)
{
    if (v == "true" || v == "on" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "off" || v == "0" || v == "no")
        return false;
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects a boolean, got '" + v + "'", line);
}

Point3 to_point(const std::string &v, int line, const std::string &key)
{
    const auto parts = split_list(v);
    if (parts.size() != 3)
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' expects x, y, z", line);
    return {to_double(parts[0], line, key), to_double(parts[1], line, key), to_double(parts[2], line, key)};
}

} // namespace

ExperimentConfig parse_config(const std::string &text)
{
    ExperimentConfig c;
    Index M = c.dims.M, N = c.dims.N, K = c.dims.K;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw))
    {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string val = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line) + ": empty key", line);

        if (key == "M")
            M = to_int(val, line, key);
        else if (key == "N")
            N = to_int(val, line, key);
        else if (key == "K")
            K = to_int(val, line, key);
        else if (key == "power_dbm")
        {
            c.power_dbm.clear();
            for (const auto &p : split_list(val))
                c.power_dbm.push_back(to_double(p, line, key));
        }
        else if (key == "noise_psd_dbm_hz")
            c.noise_psd_dbm_hz = to_double(val, line, key);
        else if (key == "bandwidth_hz")
            c.bandwidth_hz = to_double(val, line, key);
        else if (key == "noise_power_mw")
            c.noise_power_mw = to_double(val, line, key);
        else if (key == "pl_reflect_a")
            c.pl_reflect_a = to_double(val, line, key);
        else if (key == "pl_reflect_b")
            c.pl_reflect_b = to_double(val, line, key);
        else if (key == "pl_direct_a")
            c.pl_direct_a = to_double(val, line, key);
        else if (key == "pl_direct_b")
            c.pl_direct_b = to_double(val, line, key);
        else if (key == "penetration_db")
            c.penetration_db = to_double(val, line, key);
        else if (key == "reflection_efficiency")
            c.reflection_efficiency = to_double(val, line, key);
        else if (key == "bs_position")
            c.bs = to_point(val, line, key);
        else if (key == "irs_position")
            c.irs = to_point(val, line, key);
        else if (key == "user_height")
            c.user_height = to_double(val, line, key);
        else if (key == "user_area_x0")
            c.user_area_x0 = to_double(val, line, key);
        else if (key == "user_area_y0")
            c.user_area_y0 = to_double(val, line, key);
        else if (key == "user_area_size")
            c.user_area_size = to_double(val, line, key);
        else if (key == "geometry_seed")
            c.geometry_seed = to_u64(val, line, key);
        else if (key == "angular_profile")
            c.angular_profile = val;
        else if (key == "angular_spread")
            c.angular_spread = to_double(val, line, key);
        else if (key == "angular_floor")
            c.angular_floor = to_double(val, line, key);
        else if (key == "trials")
            c.trials = static_cast<int>(to_int(val, line, key));
        else if (key == "seed")
            c.seed = to_u64(val, line, key);
        else if (key == "schemes")
        {
            c.schemes.clear();
            for (const auto &s : split_list(val))
            {
                try
                {
                    c.schemes.push_back(parse_scheme(s));
                }
                catch (const ConfigError &e)
                {
                    throw ConfigError("line " + std::to_string(line) + ": " + e.what(), line);
                }
            }
        }
        else if (key == "phase_opt")
            c.phase_opt = to_bool(val, line, key);
        else if (key == "sca_max_iters")
            c.sca_max_iters = static_cast<int>(to_int(val, line, key));
        else if (key == "sca_tol")
            c.sca_tol = to_double(val, line, key);
        else if (key == "max_iters")
            c.max_iters = static_cast<int>(to_int(val, line, key));
        else if (key == "tol")
            c.tol = to_double(val, line, key);
        else if (key == "use_prior")
            c.use_prior = to_bool(val, line, key);
        else if (key == "onoff_estimator")
            c.onoff_estimator = val;
        else if (key == "onoff_cov_draws")
            c.onoff_cov_draws = static_cast<int>(to_int(val, line, key));
        else if (key == "threads")
            c.threads = static_cast<int>(to_int(val, line, key));
        else if (key == "output")
            c.output = val;
        else
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
    }
    if (M < 1 || N < 1 || K < 1)
        throw ConfigError("M/N/K: must be positive");
    c.dims = SystemDims::make(M, N, K);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

} // namespace irsce::harness
