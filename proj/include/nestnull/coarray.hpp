// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The nestnull Authors
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

/**
 * @file coarray.hpp
 * Physical linear array geometry, steering vectors and second-order
 * (difference co-array) statistics.
 *
 * Sensor positions are integers in units of the element spacing d. The
 * spacing is stored as a multiple of half a wavelength, so the default
 * geometry (spacing 1) has d = lambda/2 and the phase of sensor i at
 * direction theta is pi * spacing * position_i * sin(theta).
 */
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestnull {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

class ArrayGeometry {
public:
    explicit ArrayGeometry(std::vector<std::int64_t> positions, double spacing_half_wavelengths = 1.0)
        : positions_(std::move(positions)), spacing_(spacing_half_wavelengths)
    {
        if (positions_.empty())
            throw std::invalid_argument("ArrayGeometry: at least one sensor is required");
        for (std::size_t i = 1; i < positions_.size(); ++i)
            if (positions_[i] <= positions_[i - 1])
                throw std::invalid_argument("ArrayGeometry: positions must be strictly increasing");
        if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
            throw std::invalid_argument("ArrayGeometry: unit spacing must be positive");
    }

    [[nodiscard]] std::span<const std::int64_t> positions() const { return positions_; }
    [[nodiscard]] std::size_t size() const { return positions_.size(); }
    /// Element spacing d in units of lambda/2.
    [[nodiscard]] double spacing_half_wavelengths() const { return spacing_; }

    /// Phase advance per unit of position at direction theta: (2 pi / lambda) d sin(theta).
    [[nodiscard]] double phase_per_unit(double theta) const
    {
        return std::numbers::pi * spacing_ * std::sin(theta);
    }

    friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;

private:
    std::vector<std::int64_t> positions_;
    double spacing_;
};

struct CoArray {
    std::vector<std::int64_t> lags;        // sorted, distinct
    std::int64_t contiguous_aperture = 0;  // largest L with -L..L all present

    [[nodiscard]] bool hole_free() const
    {
        return lags.size() == static_cast<std::size_t>(2 * contiguous_aperture + 1);
    }
};

/// Two-level nested array: inner ULA {1..n1} followed by outer ULA (n1+1){1..n2}.
inline ArrayGeometry nested_positions(int n1, int n2)
{
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("nested_positions: both levels need at least one sensor");
    std::vector<std::int64_t> pos;
    pos.reserve(static_cast<std::size_t>(n1 + n2));
    for (int i = 1; i <= n1; ++i)
        pos.push_back(i);
    for (int m = 1; m <= n2; ++m)
        pos.push_back(static_cast<std::int64_t>(n1 + 1) * m);
    return ArrayGeometry(std::move(pos));
}

inline CoArray difference_coarray(const ArrayGeometry& geometry)
{
    std::set<std::int64_t> diffs;
    for (auto a : geometry.positions())
        for (auto b : geometry.positions())
            diffs.insert(a - b);
    CoArray out;
    out.lags.assign(diffs.begin(), diffs.end());
    // The difference set is symmetric, so scanning the positive side suffices.
    std::int64_t l = 0;
    while (diffs.contains(l + 1))
        ++l;
    out.contiguous_aperture = l;
    return out;
}

/// Upper bound on the co-array degrees of freedom, N(N-1).
constexpr std::int64_t max_dof(std::int64_t n_sensors)
{
    return n_sensors * (n_sensors - 1);
}

namespace detail {
inline void check_direction(double theta)
{
    constexpr double half_pi = std::numbers::pi / 2;
    if (!std::isfinite(theta) || theta < -half_pi - 1e-12 || theta > half_pi + 1e-12)
        throw std::invalid_argument("direction must lie in [-pi/2, pi/2]");
}
}  // namespace detail

inline ComplexVector steering_vector(const ArrayGeometry& geometry, double theta)
{
    detail::check_direction(theta);
    const double k = geometry.phase_per_unit(theta);
    const auto pos = geometry.positions();
    ComplexVector a(static_cast<Eigen::Index>(pos.size()));
    for (std::size_t i = 0; i < pos.size(); ++i)
        a(static_cast<Eigen::Index>(i)) = std::polar(1.0, k * static_cast<double>(pos[i]));
    return a;
}

/// conj(a) kron a. Entry i*N + j carries the lag d_j - d_i.
inline ComplexVector coarray_manifold_column(const ArrayGeometry& geometry, double theta)
{
    const ComplexVector a = steering_vector(geometry, theta);
    const Eigen::Index n = a.size();
    ComplexVector out(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        out.segment(i * n, n) = std::conj(a(i)) * a;
    return out;
}

/// vec(I_N): ones at the zero-lag positions of the vectorized covariance.
inline Eigen::VectorXd noise_indicator(std::size_t n_sensors)
{
    const auto n = static_cast<Eigen::Index>(n_sensors);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        out(i * n + i) = 1.0;
    return out;
}

struct SourceEnsemble {
    std::vector<double> directions;  // radians
    std::vector<double> powers;      // linear
    double noise_power = 0.0;

    void validate() const
    {
        if (directions.size() != powers.size())
            throw std::invalid_argument("SourceEnsemble: directions and powers differ in length");
        for (std::size_t i = 0; i < directions.size(); ++i) {
            detail::check_direction(directions[i]);
            if (!(powers[i] >= 0.0))
                throw std::invalid_argument("SourceEnsemble: source powers must be nonnegative");
            for (std::size_t j = 0; j < i; ++j)
                if (directions[i] == directions[j])
                    throw std::invalid_argument("SourceEnsemble: directions must be distinct");
        }
        if (!(noise_power >= 0.0))
            throw std::invalid_argument("SourceEnsemble: noise power must be nonnegative");
    }
};

/// Analytic covariance F diag(p) F^H + sigma_n^2 I.
inline ComplexMatrix ideal_autocorrelation(const ArrayGeometry& geometry, const SourceEnsemble& ensemble)
{
    ensemble.validate();
    const auto n = static_cast<Eigen::Index>(geometry.size());
    ComplexMatrix omega = ensemble.noise_power * ComplexMatrix::Identity(n, n);
    for (std::size_t i = 0; i < ensemble.directions.size(); ++i) {
        const ComplexVector f = steering_vector(geometry, ensemble.directions[i]);
        omega += ensemble.powers[i] * (f * f.adjoint());
    }
    return omega;
}

/// Empirical covariance from simulated snapshots. Sources and noise are
/// i.i.d. circularly-symmetric complex Gaussian per snapshot.
inline ComplexMatrix sample_autocorrelation(const ArrayGeometry& geometry, const SourceEnsemble& ensemble,
                                            std::size_t snapshots, std::uint64_t seed)
{
    ensemble.validate();
    if (snapshots == 0)
        throw std::invalid_argument("sample_autocorrelation: need at least one snapshot");
    const auto n = static_cast<Eigen::Index>(geometry.size());
    const auto d = static_cast<Eigen::Index>(ensemble.directions.size());

    ComplexMatrix manifold(n, d);
    for (Eigen::Index i = 0; i < d; ++i)
        manifold.col(i) = steering_vector(geometry, ensemble.directions[static_cast<std::size_t>(i)]);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto cgauss = [&](double power) {
        const double s = std::sqrt(power / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        return Complex(s * re, s * im);
    };

    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    ComplexVector gamma(d);
    ComplexVector r(n);
    for (std::size_t m = 0; m < snapshots; ++m) {
        for (Eigen::Index i = 0; i < d; ++i)
            gamma(i) = cgauss(ensemble.powers[static_cast<std::size_t>(i)]);
        r = manifold * gamma;
        for (Eigen::Index i = 0; i < n; ++i)
            r(i) += cgauss(ensemble.noise_power);
        acc.noalias() += r * r.adjoint();
    }
    acc /= static_cast<double>(snapshots);
    // Exact Hermitian symmetry regardless of rounding in the accumulation.
    return (acc + acc.adjoint()) / 2.0;
}

/// Column-major vec().
inline ComplexVector vectorize_autocorrelation(const ComplexMatrix& omega)
{
    if (omega.rows() != omega.cols())
        throw std::invalid_argument("vectorize_autocorrelation: matrix must be square");
    return Eigen::Map<const ComplexVector>(omega.data(), omega.size());
}

}  // namespace nestnull
