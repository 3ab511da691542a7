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
 * @file polynomial.hpp
 * Truncated multilinear polynomials over 0-1 variables, built as the
 * expansion of a product of linear factors, and their linearization.
 *
 * Storage is dense per order: the coefficients of all order-m monomials
 * over the V active variables live in one array indexed by the colex rank
 * of the sorted index set. Squares collapse (n^2 = n) during expansion.
 *
 * The product is kept normalized: each factor c + sum_i b_i n_i is written
 * as c (1 + sum_i (b_i/c) n_i) and the positive magnitude prod |c| is held
 * separately as log_scale(); any sign is folded into the coefficients.
 * Value = exp(log_scale()) * sum_S coeff_S prod_{i in S} n_i.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nestnull::opt {

struct LinearFactor {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
};

class ExpansionTooLarge : public std::length_error {
public:
    explicit ExpansionTooLarge(std::size_t terms)
        : std::length_error("polynomial expansion needs " + std::to_string(terms) +
                            " coefficients; use a smaller instance or a lower max_order")
    {
    }
};

namespace detail {

class BinomialTable {
public:
    BinomialTable(int n_max, int k_max) : k_max_(k_max), table_(static_cast<std::size_t>((n_max + 1) * (k_max + 1)), 0)
    {
        for (int n = 0; n <= n_max; ++n) {
            at(n, 0) = 1;
            for (int k = 1; k <= std::min(n, k_max); ++k)
                at(n, k) = at(n - 1, k - 1) + (k <= n - 1 ? at(n - 1, k) : 0);
        }
    }
    [[nodiscard]] std::uint64_t operator()(int n, int k) const
    {
        if (k < 0 || n < 0 || k > n)
            return 0;
        return table_[static_cast<std::size_t>(n * (k_max_ + 1) + k)];
    }

private:
    std::uint64_t& at(int n, int k) { return table_[static_cast<std::size_t>(n * (k_max_ + 1) + k)]; }
    int k_max_;
    std::vector<std::uint64_t> table_;
};

/// Saturating count of sum_{m<=max_order} C(v, m).
inline std::size_t layered_size(int v, int max_order)
{
    long double total = 0, c = 1;
    for (int m = 0; m <= max_order && m <= v; ++m) {
        total += c;
        c = c * static_cast<long double>(v - m) / static_cast<long double>(m + 1);
    }
    return total > 1e18L ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(total);
}

}  // namespace detail

class PolynomialObjective {
public:
    PolynomialObjective() : binom_(0, 0) {}

    /// Variables occur in [0, num_variables); only `active` ones may carry
    /// nonconstant coefficients.
    PolynomialObjective(int num_variables, std::vector<int> active, int max_order)
        : num_variables_(num_variables), max_order_(std::min<int>(max_order, static_cast<int>(active.size()))),
          requested_order_(max_order), active_(std::move(active)), local_(static_cast<std::size_t>(num_variables), -1),
          binom_(static_cast<int>(active_.size()), std::max(max_order_, 1))
    {
        if (max_order < 0)
            throw std::invalid_argument("PolynomialObjective: max_order must be >= 0");
        std::sort(active_.begin(), active_.end());
        active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
        for (std::size_t i = 0; i < active_.size(); ++i) {
            if (active_[i] < 0 || active_[i] >= num_variables)
                throw std::invalid_argument("PolynomialObjective: variable index out of range");
            local_[static_cast<std::size_t>(active_[i])] = static_cast<int>(i);
        }
        const int v = static_cast<int>(active_.size());
        layers_.resize(static_cast<std::size_t>(max_order_ + 1));
        for (int m = 0; m <= max_order_; ++m)
            layers_[static_cast<std::size_t>(m)].assign(binom_(v, m), 0.0);
    }

    [[nodiscard]] int num_variables() const { return num_variables_; }
    /// Truncation order as requested (the effective order never exceeds the active count).
    [[nodiscard]] int max_order() const { return requested_order_; }
    [[nodiscard]] std::span<const int> active_variables() const { return active_; }
    [[nodiscard]] double log_scale() const { return log_scale_; }
    void set_log_scale(double s) { log_scale_ = s; }

    [[nodiscard]] std::size_t term_count() const
    {
        std::size_t t = 0;
        for (const auto& l : layers_)
            t += l.size();
        return t;
    }

    /// Normalized coefficient of the monomial over `vars` (any order, repeats collapse).
    [[nodiscard]] double normalized_coefficient(std::vector<int> vars) const
    {
        std::vector<int> loc;
        if (!to_local(std::move(vars), loc))
            return 0.0;
        if (static_cast<int>(loc.size()) > max_order_)
            return 0.0;
        return layers_[loc.size()][rank(loc)];
    }

    [[nodiscard]] double coefficient(std::vector<int> vars) const
    {
        return std::exp(log_scale_) * normalized_coefficient(std::move(vars));
    }

    [[nodiscard]] double normalized_constant() const { return layers_[0][0]; }
    [[nodiscard]] double constant() const { return std::exp(log_scale_) * layers_[0][0]; }

    /// Adds delta to a normalized coefficient; monomials above the
    /// truncation order are ignored.
    void add_normalized(std::vector<int> vars, double delta)
    {
        std::vector<int> loc;
        if (!to_local(std::move(vars), loc))
            throw std::invalid_argument("PolynomialObjective: variable is not active");
        if (static_cast<int>(loc.size()) > max_order_)
            return;
        layers_[loc.size()][rank(loc)] += delta;
    }

    /// f(std::span<const int> vars, double normalized_coefficient) over every
    /// stored monomial, including zeros, order by order.
    template <class F>
    void for_each_monomial(F&& f) const
    {
        const int v = static_cast<int>(active_.size());
        std::vector<int> comb, orig;
        for (int m = 0; m <= max_order_; ++m) {
            const auto& layer = layers_[static_cast<std::size_t>(m)];
            init_comb(comb, m);
            for (std::size_t r = 0; r < layer.size(); ++r) {
                orig.resize(static_cast<std::size_t>(m));
                for (int t = 0; t < m; ++t)
                    orig[static_cast<std::size_t>(t)] = active_[static_cast<std::size_t>(comb[static_cast<std::size_t>(t)])];
                f(std::span<const int>(orig), layer[r]);
                next_comb(comb, v);
            }
        }
    }

    /// Normalized value at a binary point (n indexed by variable).
    template <class Int>
    [[nodiscard]] double evaluate_normalized(std::span<const Int> n) const
    {
        if (n.size() != static_cast<std::size_t>(num_variables_))
            throw std::invalid_argument("PolynomialObjective: point has the wrong dimension");
        std::vector<int> support;
        for (std::size_t i = 0; i < active_.size(); ++i)
            if (n[static_cast<std::size_t>(active_[i])] != 0)
                support.push_back(static_cast<int>(i));
        double total = layers_[0][0];
        const int s = static_cast<int>(support.size());
        std::vector<int> idx, loc;
        for (int m = 1; m <= std::min(max_order_, s); ++m) {
            init_comb(idx, m);
            const std::uint64_t count = binom_count(s, m);
            loc.resize(static_cast<std::size_t>(m));
            for (std::uint64_t r = 0; r < count; ++r) {
                for (int t = 0; t < m; ++t)
                    loc[static_cast<std::size_t>(t)] = support[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
                total += layers_[static_cast<std::size_t>(m)][rank(loc)];
                next_comb(idx, s);
            }
        }
        return total;
    }

    template <class Int>
    [[nodiscard]] double evaluate(std::span<const Int> n) const
    {
        return std::exp(log_scale_) * evaluate_normalized(n);
    }

    [[nodiscard]] PolynomialObjective negated() const
    {
        PolynomialObjective out = *this;
        for (auto& l : out.layers_)
            for (auto& c : l)
                c = -c;
        return out;
    }

    /// Multiplies in the normalized factor (1 + sum_i beta_i n_i); beta is
    /// indexed by local (active) position.
    void multiply_normalized_factor(const std::vector<double>& beta, const std::vector<int>& support)
    {
        if (support.empty())
            return;
        const int v = static_cast<int>(active_.size());
        std::vector<std::uint8_t> in_factor(static_cast<std::size_t>(v), 0);
        for (int i : support)
            in_factor[static_cast<std::size_t>(i)] = 1;
        std::vector<int> comb;
        // Descending order so each layer reads the previous layer's old values.
        for (int m = max_order_; m >= 1; --m) {
            auto& layer = layers_[static_cast<std::size_t>(m)];
            const auto& lower = layers_[static_cast<std::size_t>(m - 1)];
            init_comb(comb, m);
            for (std::size_t r = 0; r < layer.size(); ++r, next_comb(comb, v)) {
                bool touched = false;
                for (int t = 0; t < m; ++t)
                    touched |= in_factor[static_cast<std::size_t>(comb[static_cast<std::size_t>(t)])] != 0;
                if (!touched)
                    continue;
                const double old = layer[r];
                double acc = old;
                for (int t = 0; t < m; ++t) {
                    const int i = comb[static_cast<std::size_t>(t)];
                    const double b = beta[static_cast<std::size_t>(i)];
                    if (b == 0.0)
                        continue;
                    acc += b * (old + lower[rank_without(comb, t)]);
                }
                layer[r] = acc;
            }
        }
    }

    [[nodiscard]] int local_index(int var) const
    {
        return var >= 0 && var < num_variables_ ? local_[static_cast<std::size_t>(var)] : -1;
    }

private:
    bool to_local(std::vector<int> vars, std::vector<int>& loc) const
    {
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        loc.clear();
        for (int var : vars) {
            const int l = local_index(var);
            if (l < 0)
                return false;
            loc.push_back(l);
        }
        return true;
    }

    [[nodiscard]] std::uint64_t binom_count(int n, int k) const
    {
        // n may exceed the table for support enumeration only when n <= V.
        return binom_(n, k);
    }

    /// Colex rank of an ascending index set: sum_t C(a_t, t+1).
    [[nodiscard]] std::size_t rank(const std::vector<int>& comb) const
    {
        std::uint64_t r = 0;
        for (std::size_t t = 0; t < comb.size(); ++t)
            r += binom_(comb[t], static_cast<int>(t) + 1);
        return static_cast<std::size_t>(r);
    }

    [[nodiscard]] std::size_t rank_without(const std::vector<int>& comb, int skip) const
    {
        std::uint64_t r = 0;
        int pos = 1;
        for (int t = 0; t < static_cast<int>(comb.size()); ++t) {
            if (t == skip)
                continue;
            r += binom_(comb[static_cast<std::size_t>(t)], pos++);
        }
        return static_cast<std::size_t>(r);
    }

    static void init_comb(std::vector<int>& comb, int m)
    {
        comb.resize(static_cast<std::size_t>(m));
        std::iota(comb.begin(), comb.end(), 0);
    }

    /// Colex successor within [0, v).
    static void next_comb(std::vector<int>& comb, int v)
    {
        const int m = static_cast<int>(comb.size());
        for (int t = 0; t < m; ++t) {
            const int limit = t + 1 < m ? comb[static_cast<std::size_t>(t + 1)] : v;
            if (comb[static_cast<std::size_t>(t)] + 1 < limit) {
                ++comb[static_cast<std::size_t>(t)];
                for (int s = 0; s < t; ++s)
                    comb[static_cast<std::size_t>(s)] = s;
                return;
            }
        }
    }

    int num_variables_ = 0;
    int max_order_ = 0;
    int requested_order_ = 0;
    std::vector<int> active_;
    std::vector<int> local_;
    detail::BinomialTable binom_;
    std::vector<std::vector<double>> layers_;
    double log_scale_ = 0.0;
};

inline constexpr std::size_t default_term_limit = 16'000'000;

/// Expands prod_f factor_f into a multilinear polynomial truncated at max_order.
inline PolynomialObjective expand_product(std::span<const LinearFactor> factors, int num_variables, int max_order,
                                          std::size_t term_limit = default_term_limit)
{
    std::vector<int> active;
    for (const auto& f : factors)
        for (const auto& [var, coeff] : f.terms) {
            if (var < 0 || var >= num_variables)
                throw std::invalid_argument("expand_product: variable index out of range");
            if (coeff != 0.0)
                active.push_back(var);
        }
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    const std::size_t terms = detail::layered_size(static_cast<int>(active.size()), max_order);
    if (terms > term_limit)
        throw ExpansionTooLarge(terms);

    PolynomialObjective poly(num_variables, active, max_order);
    poly.add_normalized({}, 1.0);
    double log_scale = 0.0;
    double sign = 1.0;
    const auto v = active.size();
    std::vector<double> beta(v, 0.0);
    std::vector<int> support;
    for (const auto& f : factors) {
        if (f.constant == 0.0)
            throw std::invalid_argument("expand_product: factors need a nonzero constant term");
        log_scale += std::log(std::abs(f.constant));
        if (f.constant < 0)
            sign = -sign;
        support.clear();
        for (const auto& [var, coeff] : f.terms) {
            if (coeff == 0.0)
                continue;
            const int l = poly.local_index(var);
            if (beta[static_cast<std::size_t>(l)] == 0.0)
                support.push_back(l);
            beta[static_cast<std::size_t>(l)] += coeff / f.constant;
        }
        poly.multiply_normalized_factor(beta, support);
        for (int l : support)
            beta[static_cast<std::size_t>(l)] = 0.0;
    }
    if (sign < 0)
        poly = poly.negated();
    poly.set_log_scale(log_scale);
    return poly;
}

// ---------------------------------------------------------------- linearization

/// Every order-M monomial spreads coeff * P^(M-1) / M onto each of its variables.
struct BernoulliWeights {
    double probability = 1.0;
};

/// Per-variable probabilities: variable i of S receives coeff * prod_{l in S, l != i} P_l / M.
struct PerVariableWeights {
    std::vector<double> probability;
};

/// GM <= AM: a nonnegative coefficient spreads coeff / M; a negative
/// coefficient of order >= 2 is bounded by 0. The result bounds the
/// polynomial from above at every binary point.
struct UpperBoundWeights {};

using WeightRule = std::variant<BernoulliWeights, PerVariableWeights, UpperBoundWeights>;

/// constant + c . n in the polynomial's normalized units.
struct LinearObjective {
    std::vector<double> c;
    double constant = 0.0;

    template <class Int>
    [[nodiscard]] double value(std::span<const Int> n) const
    {
        double v = constant;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (n[i] != 0)
                v += c[i];
        return v;
    }
};

inline LinearObjective linearize(const PolynomialObjective& poly, const WeightRule& rule)
{
    LinearObjective out;
    out.c.assign(static_cast<std::size_t>(poly.num_variables()), 0.0);
    if (const auto* pv = std::get_if<PerVariableWeights>(&rule))
        if (pv->probability.size() != out.c.size())
            throw std::invalid_argument("linearize: per-variable probabilities have the wrong length");
    poly.for_each_monomial([&](std::span<const int> vars, double coeff) {
        const std::size_t m = vars.size();
        if (coeff == 0.0)
            return;
        if (m == 0) {
            out.constant += coeff;
            return;
        }
        if (m == 1) {
            out.c[static_cast<std::size_t>(vars[0])] += coeff;
            return;
        }
        const double md = static_cast<double>(m);
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, BernoulliWeights>) {
                    const double w = coeff * std::pow(r.probability, md - 1.0) / md;
                    for (int i : vars)
                        out.c[static_cast<std::size_t>(i)] += w;
                } else if constexpr (std::is_same_v<R, PerVariableWeights>) {
                    for (std::size_t t = 0; t < m; ++t) {
                        double w = coeff / md;
                        for (std::size_t s = 0; s < m; ++s)
                            if (s != t)
                                w *= r.probability[static_cast<std::size_t>(vars[s])];
                        out.c[static_cast<std::size_t>(vars[t])] += w;
                    }
                } else {
                    if (coeff > 0.0)
                        for (int i : vars)
                            out.c[static_cast<std::size_t>(i)] += coeff / md;
                }
            },
            rule);
    });
    return out;
}

}  // namespace nestnull::opt
