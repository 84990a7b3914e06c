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

#ifndef IRSCE_TYPES_HPP
#define IRSCE_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace irsce {

using Index = Eigen::Index;

template <typename Real> using Complex = std::complex<Real>;
template <typename Real> using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real> using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real> using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Raised when a caller violates a documented precondition (shapes, positivity, unit modulus).
class InvalidInput : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a linear system cannot be solved even after regularization.
class SolverError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// ----- Warnings ----------------------------------------------------------
// Numerical fallbacks (regularized solves, ill-conditioned references) are
// reported through a process-wide sink, by default std::clog.

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {
inline std::mutex &warning_mutex()
{
    static std::mutex m;
    return m;
}
inline WarningHandler &warning_handler()
{
    static WarningHandler h = [](std::string_view msg) { std::clog << "irsce warning: " << msg << '\n'; };
    return h;
}
} // namespace detail

inline void set_warning_handler(WarningHandler handler)
{
    std::lock_guard<std::mutex> lock(detail::warning_mutex());
    detail::warning_handler() = std::move(handler);
}

inline void warn(std::string_view message)
{
    std::lock_guard<std::mutex> lock(detail::warning_mutex());
    if (detail::warning_handler())
        detail::warning_handler()(message);
}

// ----- Random streams ----------------------------------------------------

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds from tuples.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) noexcept
{
    return mix_seed(mix_seed(base) ^ (a + 0x632BE59BD9B4E019ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, Rest... rest) noexcept
{
    return derive_seed(derive_seed(base, a), static_cast<std::uint64_t>(rest)...);
}

/// Draws a circularly-symmetric complex Gaussian with E|z|^2 = variance.
template <typename Real>
Complex<Real> complex_gaussian(Rng &rng, Real variance)
{
    std::normal_distribution<Real> nd(Real(0), std::sqrt(variance / Real(2)));
    const Real re = nd(rng);
    const Real im = nd(rng);
    return {re, im};
}

template <typename Real>
CMatrix<Real> complex_gaussian_matrix(Rng &rng, Index rows, Index cols, Real variance)
{
    CMatrix<Real> out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            out(i, j) = complex_gaussian<Real>(rng, variance);
    return out;
}

/// Uniform random phase vector e^{j phi}, phi ~ U[0, 2pi).
template <typename Real>
CVector<Real> random_unit_modulus(Rng &rng, Index n)
{
    std::uniform_real_distribution<Real> ud(Real(0), Real(2) * Real(EIGEN_PI));
    CVector<Real> v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = std::polar(Real(1), ud(rng));
    return v;
}

} // namespace irsce

#endif // IRSCE_TYPES_HPP
