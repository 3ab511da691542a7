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
 * @file beamforming.hpp
 * Co-array domain beamforming: weights w of length N^2 such that the
 * pattern B(theta) = w^H (conj(a) kron a) is 1 toward desired directions,
 * 0 toward interferers and, optionally, w^H vec(I) = 0 so white noise is
 * removed as well.
 */
#pragma once

#include "nestnull/coarray.hpp"

#include <Eigen/QR>

#include <sstream>

namespace nestnull {

struct NullingSpec {
    std::vector<double> desired;  // radians
    std::vector<double> nulls;    // radians
    bool null_noise = true;

    void validate() const
    {
        std::vector<double> all(desired);
        all.insert(all.end(), nulls.begin(), nulls.end());
        for (std::size_t i = 0; i < all.size(); ++i) {
            detail::check_direction(all[i]);
            for (std::size_t j = 0; j < i; ++j)
                if (all[i] == all[j])
                    throw std::invalid_argument("NullingSpec: desired and null directions must be distinct");
        }
    }
};

/// Number of pattern constraints a spec imposes.
inline std::size_t pattern_row_count(const NullingSpec& spec)
{
    return spec.desired.size() + spec.nulls.size() + (spec.null_noise ? 1 : 0);
}

/// Shared budget rule: a set of pattern constraints fits a degree-of-freedom
/// budget when the row count does not exceed it. The network model applies
/// the same rule with the per-BS budget D_j.
constexpr bool fits_dof_budget(std::size_t rows, std::size_t budget)
{
    return rows <= budget;
}

class DofExceeded : public std::invalid_argument {
public:
    DofExceeded(std::size_t rows, std::size_t budget)
        : std::invalid_argument("DoF exceeded: " + std::to_string(rows) + " pattern constraints for a budget of " +
                                std::to_string(budget)),
          rows_(rows), budget_(budget)
    {
    }
    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t budget() const { return budget_; }

private:
    std::size_t rows_;
    std::size_t budget_;
};

class UnachievablePattern : public std::runtime_error {
public:
    explicit UnachievablePattern(double residual)
        : std::runtime_error(message(residual)), residual_(residual)
    {
    }
    [[nodiscard]] double residual() const { return residual_; }

private:
    static std::string message(double residual)
    {
        std::ostringstream os;
        os << "unachievable pattern: residual " << residual;
        return os.str();
    }
    double residual_;
};

struct ConstraintSystem {
    ComplexMatrix matrix;  // rows: manifold columns conjugate-transposed, then vec(I)^T
    Eigen::VectorXd rhs;
};

inline ConstraintSystem build_constraint_system(const ArrayGeometry& geometry, const NullingSpec& spec)
{
    spec.validate();
    const std::size_t n = geometry.size();
    const std::size_t rows = pattern_row_count(spec);
    if (!fits_dof_budget(rows, n * n))
        throw DofExceeded(rows, n * n);

    ConstraintSystem sys;
    const auto cols = static_cast<Eigen::Index>(n * n);
    sys.matrix.resize(static_cast<Eigen::Index>(rows), cols);
    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
    Eigen::Index r = 0;
    for (double d : spec.desired) {
        sys.matrix.row(r) = coarray_manifold_column(geometry, d).adjoint();
        sys.rhs(r++) = 1.0;
    }
    for (double eta : spec.nulls)
        sys.matrix.row(r++) = coarray_manifold_column(geometry, eta).adjoint();
    if (spec.null_noise)
        sys.matrix.row(r++) = noise_indicator(n).cast<Complex>().transpose();
    return sys;
}

struct BeamTolerances {
    double residual = 1e-8;
    double null_depth = 1e-6;
};

struct CoArrayWeights {
    ComplexVector w;
    double residual = 0.0;
};

/// Minimum-norm solution of the pattern constraints. Throws
/// UnachievablePattern when the constraints cannot be met to tolerance.
inline CoArrayWeights solve_weights(const ArrayGeometry& geometry, const NullingSpec& spec,
                                    const BeamTolerances& tol = {})
{
    if (spec.desired.empty())
        throw std::invalid_argument("solve_weights: at least one desired direction is required");
    const ConstraintSystem sys = build_constraint_system(geometry, spec);
    const Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(sys.matrix);
    const ComplexVector rhs = sys.rhs.cast<Complex>();
    CoArrayWeights out;
    out.w = cod.solve(rhs);
    out.residual = (sys.matrix * out.w - rhs).norm();
    if (!(out.residual <= tol.residual))
        throw UnachievablePattern(out.residual);
    return out;
}

/// B(theta) = w^H (conj(a(theta)) kron a(theta)).
inline Complex beam_pattern(const ArrayGeometry& geometry, const ComplexVector& w, double theta)
{
    const std::size_t n = geometry.size();
    if (static_cast<std::size_t>(w.size()) != n * n)
        throw std::invalid_argument("beam_pattern: weight length must be N^2");
    return w.dot(coarray_manifold_column(geometry, theta));
}

/// Output r' = sum_i B(theta_i) sigma_i^2 + sigma_n^2 w^H vec(I).
inline Complex filtered_output(const ArrayGeometry& geometry, const ComplexVector& w, const SourceEnsemble& ensemble)
{
    ensemble.validate();
    Complex out = ensemble.noise_power * w.dot(noise_indicator(geometry.size()).cast<Complex>());
    for (std::size_t i = 0; i < ensemble.directions.size(); ++i)
        out += beam_pattern(geometry, w, ensemble.directions[i]) * ensemble.powers[i];
    return out;
}

/// Real part of filtered_output; real whenever the pattern constraints hold.
inline double filtered_power(const ArrayGeometry& geometry, const CoArrayWeights& weights,
                             const SourceEnsemble& ensemble)
{
    return filtered_output(geometry, weights.w, ensemble).real();
}

}  // namespace nestnull
