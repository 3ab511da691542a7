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

// Reference computations used by the tests. Each one is written from the
// model definitions with plain loops and shares no code with the library
// beyond the input types.

#pragma once

#include "nestnull/nestnull.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

inline std::set<std::int64_t> lag_set(const std::vector<std::int64_t>& pos)
{
    std::set<std::int64_t> out;
    for (auto a : pos)
        for (auto b : pos)
            out.insert(a - b);
    return out;
}

// ---------------------------------------------------------------- rates

struct Denominators {
    std::vector<double> up, down;  // per user
};

/// Interference denominators of every user written out link by link.
inline Denominators denominators(const nestnull::Scenario& s, const nestnull::NullingAssignment& n)
{
    const int K = s.num_users(), B = s.num_bs();
    Denominators d;
    for (int k = 0; k < K; ++k) {
        const int j = s.serving(k);
        double up = s.noise_floor(), down = s.noise_floor();
        if (j == 0) {
            for (int kp = 0; kp < K; ++kp)
                if (s.serving(kp) >= 1)
                    up += s.user_power(kp) * s.gain(kp, 0) * (1 - n(kp, 0));
            for (int jp = 1; jp < B; ++jp)
                down += s.bs_power(jp) * s.gain(k, jp) * (1 - n(k, jp));
        } else {
            for (int kp = 0; kp < K; ++kp)
                if (kp != k)
                    up += s.user_power(kp) * s.gain(kp, j) * (1 - n(kp, j));
            for (int jp = 1; jp < B; ++jp)
                if (jp != j)
                    down += s.bs_power(jp) * s.gain(k, jp) * (1 - n(k, jp));
        }
        d.up.push_back(up);
        d.down.push_back(down);
    }
    return d;
}

/// Sum rate in nats/s/Hz.
inline double sum_rate(const nestnull::Scenario& s, const nestnull::NullingAssignment& n)
{
    const auto d = denominators(s, n);
    double total = 0.0;
    for (int k = 0; k < s.num_users(); ++k) {
        const int j = s.serving(k);
        const double a = s.ratio(j) * s.gain(k, j);
        total += std::log(1.0 + a * s.user_power(k) / d.up[static_cast<std::size_t>(k)]);
        total += std::log(1.0 + a * s.bs_power(j) / d.down[static_cast<std::size_t>(k)]);
    }
    return total;
}

/// -prod W(n) / prod W(0): the negated product of denominators, scaled by
/// its value with nothing nulled.
inline double normalized_negated_product(const nestnull::Scenario& s, const nestnull::NullingAssignment& n)
{
    const auto d = denominators(s, n);
    const auto d0 = denominators(s, nestnull::NullingAssignment::zeros(s));
    double p = 1.0;
    for (std::size_t k = 0; k < d.up.size(); ++k)
        p *= (d.up[k] / d0.up[k]) * (d.down[k] / d0.down[k]);
    return -p;
}

inline bool feasible(const nestnull::Scenario& s, const nestnull::NullingAssignment& n)
{
    for (int j = 0; j < s.num_bs(); ++j) {
        int rows = 1;
        for (int k = 0; k < s.num_users(); ++k) {
            if (s.serving(k) == j) {
                if (n(k, j))
                    return false;
                rows += s.q(k, j);
            }
            if (n(k, j) > 1)
                return false;
            if (n(k, j))
                rows += s.q(k, j);
        }
        if (rows > s.dof(j))
            return false;
    }
    return true;
}

/// Visits every feasible assignment.
template <class F>
void for_each_feasible(const nestnull::Scenario& s, F&& f)
{
    const int K = s.num_users(), B = s.num_bs();
    const int V = K * B;
    for (std::uint32_t mask = 0; mask < (1u << V); ++mask) {
        nestnull::NullingAssignment n(K, B);
        for (int v = 0; v < V; ++v)
            if (mask >> v & 1u)
                n.set(v % K, v / K, 1);
        if (feasible(s, n))
            f(n);
    }
}

// ---------------------------------------------------------------- integer programs

struct BinaryOptimum {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<int> x;
    std::size_t feasible_points = 0;
};

/// max c.x over x in {0,1}^n with Ax <= b, by enumeration.
inline BinaryOptimum exhaustive_binary(const std::vector<double>& c, const std::vector<std::vector<std::int64_t>>& A,
                                       const std::vector<double>& b)
{
    const std::size_t n = c.size();
    BinaryOptimum best;
    std::vector<int> x(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i)
            x[i] = static_cast<int>(mask >> i & 1u);
        bool ok = true;
        for (std::size_t r = 0; r < A.size() && ok; ++r) {
            std::int64_t lhs = 0;
            for (std::size_t i = 0; i < n; ++i)
                lhs += A[r][i] * x[i];
            ok = static_cast<double>(lhs) <= b[r];
        }
        if (!ok)
            continue;
        ++best.feasible_points;
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (x[i])
                v += c[i];
        if (v > best.value) {
            best.value = v;
            best.x = x;
        }
    }
    return best;
}

/// max c.x over {Ax <= b, x >= 0} by enumerating every basic solution.
/// Empty when infeasible.
inline std::optional<double> lp_by_vertices(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                                            const std::vector<double>& b)
{
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(A.size());
    // Constraint i < m is row i of A; i >= m is -x_{i-m} <= 0.
    auto coef = [&](int i, int j) { return i < m ? A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] : (i - m == j ? -1.0 : 0.0); };
    auto rhs = [&](int i) { return i < m ? b[static_cast<std::size_t>(i)] : 0.0; };
    std::optional<double> best;
    std::vector<int> pick(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        pick[static_cast<std::size_t>(i)] = i;
    const int total = m + n;
    while (true) {
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd r(n);
        for (int t = 0; t < n; ++t) {
            for (int j = 0; j < n; ++j)
                M(t, j) = coef(pick[static_cast<std::size_t>(t)], j);
            r(t) = rhs(pick[static_cast<std::size_t>(t)]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(r);
            bool ok = true;
            for (int i = 0; i < total && ok; ++i) {
                double lhs = 0.0;
                for (int j = 0; j < n; ++j)
                    lhs += coef(i, j) * x(j);
                ok = lhs <= rhs(i) + 1e-9;
            }
            if (ok) {
                double v = 0.0;
                for (int j = 0; j < n; ++j)
                    v += c[static_cast<std::size_t>(j)] * x(j);
                if (!best || v > *best)
                    best = v;
            }
        }
        int t = n - 1;
        while (t >= 0 && pick[static_cast<std::size_t>(t)] == total - n + t)
            --t;
        if (t < 0)
            break;
        ++pick[static_cast<std::size_t>(t)];
        for (int u = t + 1; u < n; ++u)
            pick[static_cast<std::size_t>(u)] = pick[static_cast<std::size_t>(u - 1)] + 1;
    }
    return best;
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
inline std::int64_t bareiss_determinant(std::vector<std::vector<std::int64_t>> a)
{
    const std::size_t n = a.size();
    if (n == 0)
        return 1;
    int sign = 1;
    std::int64_t prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && a[p][k] == 0)
                ++p;
            if (p == n)
                return 0;
            std::swap(a[p], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

// ---------------------------------------------------------------- polynomials

using Monomials = std::map<std::vector<int>, double>;

/// prod_f (constant_f + sum_i coeff_i n_i) with n_i^2 = n_i, monomials
/// above max_order dropped.
inline Monomials expand(const std::vector<nestnull::opt::LinearFactor>& factors, int max_order)
{
    Monomials poly{{{}, 1.0}};
    for (const auto& f : factors) {
        Monomials next;
        for (const auto& [vars, coeff] : poly) {
            next[vars] += coeff * f.constant;
            for (const auto& [v, a] : f.terms) {
                std::set<int> merged(vars.begin(), vars.end());
                merged.insert(v);
                if (static_cast<int>(merged.size()) > max_order)
                    continue;
                next[std::vector<int>(merged.begin(), merged.end())] += coeff * a;
            }
        }
        poly = std::move(next);
    }
    return poly;
}

inline double evaluate(const Monomials& poly, const std::vector<int>& n)
{
    double v = 0.0;
    for (const auto& [vars, coeff] : poly) {
        bool on = true;
        for (int i : vars)
            on = on && n[static_cast<std::size_t>(i)] != 0;
        if (on)
            v += coeff;
    }
    return v;
}

inline double nulling_probability(double mean_dof, double mean_q, double K, double J)
{
    return (mean_dof - 1.0) / (mean_q * K) - 1.0 / J - 1.0 / (mean_q * J * K);
}

}  // namespace oracle

namespace fixture {

struct SmallNetwork {
    int users = 3;
    int small_cells = 1;
    int extra_dof_max = 4;
    int q_max = 3;
    bool common_paths = false;  // q_{k,j} = L_j per BS
};

/// A random feasible scenario with powers in dB relative to the noise.
template <class Rng>
nestnull::Scenario random_scenario(Rng& rng, const SmallNetwork& shape)
{
    using namespace nestnull;
    std::uniform_real_distribution<double> gain(-40.0, 0.0), power(0.0, 20.0), coord(-100.0, 100.0);
    std::uniform_int_distribution<int> qd(1, shape.q_max), extra(0, shape.extra_dof_max),
        serve(0, shape.small_cells);
    const int K = shape.users, B = shape.small_cells + 1;
    std::vector<User> users(static_cast<std::size_t>(K));
    for (auto& u : users) {
        u.position = {coord(rng), coord(rng)};
        u.tx_power_dbm = power(rng);
        u.serving_bs = serve(rng);
    }
    Eigen::MatrixXd g(K, B);
    Eigen::MatrixXi q(K, B);
    std::vector<int> common(static_cast<std::size_t>(B));
    for (auto& l : common)
        l = qd(rng);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < B; ++j) {
            g(k, j) = gain(rng);
            q(k, j) = shape.common_paths ? common[static_cast<std::size_t>(j)] : qd(rng);
        }
    std::vector<BaseStation> bss;
    for (int j = 0; j < B; ++j) {
        int load = 0;
        for (int k = 0; k < K; ++k)
            if (users[static_cast<std::size_t>(k)].serving_bs == j)
                load += q(k, j);
        BaseStation b;
        b.position = {coord(rng), coord(rng)};
        b.tx_power_dbm = power(rng) + (j == 0 ? 10.0 : 0.0);
        b.array_gain_ratio = j == 0 ? 100.0 : 10.0;
        b.dof_budget = load + 1 + extra(rng);
        bss.push_back(b);
    }
    return Scenario(std::move(bss), std::move(users), std::move(g), std::move(q), 1.0, 0.0);
}

// Random knapsack-like rows over binary variables, boxes appended.
template <class Rng>
nestnull::opt::IntegerProgram random_program(Rng& rng, int n, int m)
{
    nestnull::opt::IntegerProgram ip;
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int i = 0; i < n; ++i)
        ip.c.push_back(u(rng));
    for (int r = 0; r < m; ++r) {
        std::vector<std::int64_t> row(static_cast<std::size_t>(n));
        for (auto& a : row)
            a = static_cast<std::int64_t>(rng() % 7) - 1;
        ip.A.push_back(row);
        ip.b.push_back(static_cast<double>(rng() % 9));
    }
    for (int i = 0; i < n; ++i) {
        std::vector<std::int64_t> row(static_cast<std::size_t>(n), 0);
        row[static_cast<std::size_t>(i)] = 1;
        ip.A.push_back(row);
        ip.b.push_back(1.0);
    }
    return ip;
}

}  // namespace fixture
