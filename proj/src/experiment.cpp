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

#include "irsce/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace irsce::harness {

namespace {

double distance(const Point3 &a, const Point3 &b)
{
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

// Both arrays are laid out along the x axis; the DFT bin follows the
// half-wavelength spatial frequency cos(angle to x) / 2.
double angular_bin(const Point3 &from, const Point3 &to, Index size)
{
    const double d = distance(from, to);
    const double u = d > 0 ? (to.x - from.x) / d : 0.0;
    return std::fmod(double(size) * u / 2.0 + double(size), double(size));
}

RVector<double> profile(const ExperimentConfig &cfg, Index size, double center)
{
    if (cfg.angular_profile == "uniform")
        return uniform_profile<double>(size);
    return exponential_profile<double>(size, center, cfg.angular_spread, cfg.angular_floor);
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

} // namespace

std::uint64_t scheme_stream(Scheme s)
{
    return static_cast<std::uint64_t>(s) + 1;
}

Scenario build_scenario(const ExperimentConfig &cfg)
{
    cfg.validate();
    Scenario sc;
    sc.dims = cfg.dims;
    sc.bases = make_angular_bases<double>(cfg.dims);

    Rng geo(cfg.geometry_seed);
    std::uniform_real_distribution<double> ud(0.0, cfg.user_area_size);
    for (Index k = 0; k < cfg.dims.K; ++k)
    {
        const double x = cfg.user_area_x0 + ud(geo);
        const double y = cfg.user_area_y0 + ud(geo);
        sc.users.push_back({x, y, cfg.user_height});
    }

    const Index M = cfg.dims.M, N = cfg.dims.N;
    auto &st = sc.stats;
    const double d_bi = distance(cfg.bs, cfg.irs);
    st.bs_irs_gain = cfg.reflection_efficiency * db_to_linear(-(cfg.pl_reflect_a + cfg.pl_reflect_b * std::log10(d_bi)));
    st.bs_irs_irs_side = profile(cfg, N, angular_bin(cfg.irs, cfg.bs, N));
    st.bs_irs_bs_side = profile(cfg, M, angular_bin(cfg.bs, cfg.irs, M));
    for (const auto &u : sc.users)
    {
        const double d_iu = distance(cfg.irs, u);
        const double d_bu = distance(cfg.bs, u);
        st.user_irs.push_back(profile(cfg, N, angular_bin(cfg.irs, u, N)));
        st.user_irs_gain.push_back(db_to_linear(-(cfg.pl_reflect_a + cfg.pl_reflect_b * std::log10(d_iu))));
        st.direct.push_back(profile(cfg, M, angular_bin(cfg.bs, u, M)));
        st.direct_gain.push_back(db_to_linear(-(cfg.pl_direct_a + cfg.pl_direct_b * std::log10(d_bu) + cfg.penetration_db)));
    }
    sc.cov = model_covariances(cfg.dims, sc.bases, st);
    validate_covariances(sc.cov);

    const bool need_relative = cfg.onoff_estimator == "lmmse" &&
                               std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::onoff) != cfg.schemes.end();
    if (need_relative)
    {
        Rng rng(derive_seed(cfg.geometry_seed, 0x5E1A71u));
        for (Index k = 1; k < cfg.dims.K; ++k)
            sc.relative_cov.push_back(relative_channel_covariance(cfg.dims, sc.bases, st, k, cfg.onoff_cov_draws, rng));
    }
    return sc;
}

SteeringResult<double> design_steering(const Scenario &sc, const ExperimentConfig &cfg)
{
    const CVector<double> ones = CVector<double>::Ones(sc.dims.N);
    if (!cfg.phase_opt)
    {
        SteeringResult<double> r;
        r.vartheta = ones;
        return r;
    }
    const CMatrix<double> E = build_gain_matrix(sc.cov, dft_matrix<double>(sc.dims.N, false), sc.dims.L1());
    auto from_ones = optimize_steering<double>(E, ones, cfg.sca_tol, cfg.sca_max_iters);
    auto from_eig = optimize_steering<double>(E, principal_phase_start(E), cfg.sca_tol, cfg.sca_max_iters);
    return from_eig.trajectory.back() >= from_ones.trajectory.back() ? from_eig : from_ones;
}

TrialOutcome run_trial(const Scenario &sc, const ExperimentConfig &cfg, Scheme scheme, const CVector<double> &vartheta,
                       double noise_variance, std::uint64_t seed)
{
    TrialOutcome out;
    try
    {
        Rng rng(seed);
        const auto pilots = build_pilots<double>(sc.dims.K);
        if (scheme == Scheme::onoff)
        {
            const auto plan = make_onoff_plan<double>(sc.dims);
            const auto ch = sample_channels(sc.dims, sc.bases, sc.stats, rng);
            const auto rec = simulate_onoff(ch, plan, pilots, noise_variance, rng);
            std::vector<RelativeOptions<double>> opts;
            for (const auto &C : sc.relative_cov)
                opts.push_back({RelativeEstimator::lmmse, C, noise_variance});
            const auto est = estimate_onoff(rec, plan, ch.direct, opts);
            out.nmse = nmse(est, cascaded_channels(ch));
        }
        else
        {
            const CVector<double> v =
                scheme == Scheme::proposed_random_vartheta ? random_unit_modulus<double>(rng, sc.dims.N) : vartheta;
            const auto plan = build_phase_plan(v);
            const auto ch = sample_channels(sc.dims, sc.bases, sc.stats, rng);
            const auto rec = simulate_training(ch, plan, pilots, noise_variance, rng);
            const auto obs = preprocess(rec, pilots);
            EstimatorConfig<double> ec;
            ec.max_iters = cfg.max_iters;
            ec.tol = cfg.tol;
            ec.use_prior = cfg.use_prior;
            const auto problem = make_map_problem(obs, plan, sc.cov, ec);
            const auto est = estimate(problem, ec);
            out.nmse = nmse(est.cascaded, cascaded_channels(ch));
            out.iterations = est.state.iterations;
        }
        if (!std::isfinite(out.nmse))
            out.failed = true;
    }
    catch (const std::exception &)
    {
        out.failed = true;
    }
    return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &fn)
{
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), std::max<std::size_t>(count, 1));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

CellResult run_cell(const Scenario &sc, const ExperimentConfig &cfg, Scheme scheme, std::size_t power_index,
                    const CVector<double> &vartheta, std::uint64_t stream_tag, int threads)
{
    const auto t0 = std::chrono::steady_clock::now();
    const double power_dbm = cfg.power_dbm.at(power_index);
    const double noise_variance = cfg.noise_power() / std::pow(10.0, power_dbm / 10.0);

    const auto n = static_cast<std::size_t>(cfg.trials);
    std::vector<TrialOutcome> outcomes(n);
    parallel_for(n, threads, [&](std::size_t i) {
        outcomes[i] = run_trial(sc, cfg, scheme, vartheta, noise_variance, derive_seed(cfg.seed, stream_tag, power_index, i));
    });

    CellResult cr;
    ResultRow &r = cr.row;
    r.scheme = scheme_name(scheme);
    r.power_dbm = power_dbm;
    r.M = sc.dims.M;
    r.N = sc.dims.N;
    r.K = sc.dims.K;
    r.trials = cfg.trials;

    double sum = 0, iters = 0;
    int kept = 0;
    cr.per_trial.reserve(n);
    for (const auto &o : outcomes)
    {
        if (o.failed)
        {
            ++r.failed;
            cr.per_trial.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        cr.per_trial.push_back(o.nmse);
        sum += o.nmse;
        iters += o.iterations;
        ++kept;
    }
    if (kept > 0)
    {
        r.nmse = sum / kept;
        r.mean_iters = iters / kept;
        double ss = 0;
        for (double x : cr.per_trial)
            if (!std::isnan(x))
                ss += (x - r.nmse) * (x - r.nmse);
        r.std_err = kept > 1 ? std::sqrt(ss / double(kept - 1) / double(kept)) : 0.0;
    }
    else
        r.nmse = std::numeric_limits<double>::quiet_NaN();
    r.nmse_db = 10.0 * std::log10(r.nmse);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cr;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg, int threads)
{
    const Scenario sc = build_scenario(cfg);
    const CVector<double> vartheta = design_steering(sc, cfg).vartheta;
    std::vector<ResultRow> rows;
    for (Scheme s : cfg.schemes)
        for (std::size_t p = 0; p < cfg.power_dbm.size(); ++p)
            rows.push_back(run_cell(sc, cfg, s, p, vartheta, scheme_stream(s), threads).row);
    return rows;
}

std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(std::ostream &os, const std::vector<ResultRow> &rows, bool timing)
{
    os << "schema=1\n";
    os << "scheme,p_t_dbm,M,N,K,trials,failed,nmse,nmse_db,std_err,mean_iters";
    if (timing)
        os << ",wall_time_s";
    os << '\n';
    for (const auto &r : rows)
    {
        os << r.scheme << ',' << format_double(r.power_dbm) << ',' << r.M << ',' << r.N << ',' << r.K << ',' << r.trials
           << ',' << r.failed << ',' << format_double(r.nmse) << ',' << format_double(r.nmse_db) << ','
           << format_double(r.std_err) << ',' << format_double(r.mean_iters);
        if (timing)
            os << ',' << format_double(r.wall_time_s);
        os << '\n';
    }
}

} // namespace irsce::harness
