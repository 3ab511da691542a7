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
 * @file optimizer.hpp
 * Nulling assignment solvers.
 *
 * The product form multiplies, over every served user, the interference
 * denominators of its uplink and downlink rates. Lower products mean
 * higher rates, so the surrogate that is maximized is the negated
 * product, expanded to a truncated multilinear polynomial. Its
 * linearization gives a 0-1 program solved with exact Gomory cuts
 * (branch and bound after a cut limit). Objective values of the surrogate
 * and its linearizations are reported in the polynomial's normalized
 * units (see PolynomialObjective).
 */
#pragma once

#include "nestnull/hetnet.hpp"
#include "nestnull/integer_program.hpp"
#include "nestnull/polynomial.hpp"
#include "nestnull/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nestnull::opt {

// ---------------------------------------------------------------- product form

/// noise_floor + sum of interferer powers, minus power * n for each
/// interferer that may be nulled.
inline LinearFactor denominator_factor(const Scenario& s, const LinkBudget& lb)
{
    LinearFactor f;
    f.constant = s.noise_floor();
    for (const auto& t : lb.interferers) {
        f.constant += t.power;
        if (!s.x(t.user, t.bs))
            f.terms.emplace_back(t.bs * s.num_users() + t.user, -t.power);
    }
    return f;
}

/// Uplink then downlink factor for every user, in user order.
inline std::vector<LinearFactor> p2_factors(const Scenario& s)
{
    std::vector<LinearFactor> out;
    out.reserve(static_cast<std::size_t>(2 * s.num_users()));
    for (int k = 0; k < s.num_users(); ++k) {
        out.push_back(denominator_factor(s, uplink_budget(s, k)));
        out.push_back(denominator_factor(s, downlink_budget(s, k)));
    }
    return out;
}

/// log of the product of all interference denominators.
inline double p2_log_product(const Scenario& s, const NullingAssignment& n)
{
    double total = 0.0;
    for (int k = 0; k < s.num_users(); ++k) {
        total += std::log(interference_power(s, n, uplink_budget(s, k).interferers));
        total += std::log(interference_power(s, n, downlink_budget(s, k).interferers));
    }
    return total;
}

/// The raw product (may overflow to inf on large networks).
inline double p2_product(const Scenario& s, const NullingAssignment& n)
{
    return std::exp(p2_log_product(s, n));
}

inline double p2_negated_log(const Scenario& s, const NullingAssignment& n)
{
    return -p2_log_product(s, n);
}

// ---------------------------------------------------------------- probability

inline constexpr double min_probability = 1e-3;

/// Unclamped value for mean DoF, mean path count, K users and J small cells.
inline double nulling_probability_formula(double mean_dof, double mean_q, int num_users, int num_small_cells)
{
    const double K = num_users;
    const double J = num_small_cells;
    return (mean_dof - 1.0) / (mean_q * K) - 1.0 / J - 1.0 / (mean_q * J * K);
}

inline double clamp_probability(double p)
{
    if (std::isnan(p))
        return 1.0;
    return std::clamp(p, min_probability, 1.0);
}

/// Shared nulling probability over all variables. Networks without users
/// or without small cells get 1.
inline double nulling_probability(const Scenario& s)
{
    const int K = s.num_users();
    const int J = s.num_small_cells();
    if (K == 0 || J == 0)
        return 1.0;
    double dof = 0.0;
    for (int j = 0; j <= J; ++j)
        dof += s.dof(j);
    dof /= J + 1;
    const double q = s.multipath_matrix().cast<double>().mean();
    return clamp_probability(nulling_probability_formula(dof, q, K, J));
}

/// One probability per BS from its own budget and mean path count,
/// replicated onto the stacked variables of that BS.
inline std::vector<double> per_bs_probabilities(const Scenario& s)
{
    const int K = s.num_users();
    const int J = s.num_small_cells();
    std::vector<double> p(static_cast<std::size_t>(K * s.num_bs()), 1.0);
    if (K == 0 || J == 0)
        return p;
    for (int j = 0; j <= J; ++j) {
        const double q = s.multipath_matrix().col(j).cast<double>().mean();
        const double pj = clamp_probability(nulling_probability_formula(s.dof(j), q, K, J));
        for (int k = 0; k < K; ++k)
            p[static_cast<std::size_t>(j * K + k)] = pj;
    }
    return p;
}

// ---------------------------------------------------------------- surrogate

enum class ProbabilityMode { shared, per_bs };

struct SurrogateOptions {
    int max_order = 3;
    std::size_t term_limit = default_term_limit;
    ProbabilityMode probability = ProbabilityMode::shared;
};

/// Negated, truncated product form of one scenario, shared by every
/// surrogate-based method.
struct Surrogate {
    PolynomialObjective poly;
    WeightRule expectation_rule;

    [[nodiscard]] double value(const NullingAssignment& n) const
    {
        return poly.evaluate_normalized(std::span<const std::uint8_t>(n.stacked()));
    }
};

inline Surrogate build_surrogate(const Scenario& s, const SurrogateOptions& opt = {})
{
    const auto factors = p2_factors(s);
    Surrogate out;
    out.poly = expand_product(factors, s.num_users() * s.num_bs(), opt.max_order, opt.term_limit).negated();
    if (opt.probability == ProbabilityMode::per_bs)
        out.expectation_rule = PerVariableWeights{per_bs_probabilities(s)};
    else
        out.expectation_rule = BernoulliWeights{nulling_probability(s)};
    return out;
}

/// Linearized surrogate with the scenario's constraint rows.
struct LinearizedProgram {
    IntegerProgram ip;
    LinearObjective objective;
};

inline LinearizedProgram build_program(const Scenario& s, const Surrogate& sur, const WeightRule& rule)
{
    LinearizedProgram out{constraint_rows(s), linearize(sur.poly, rule)};
    out.ip.c = out.objective.c;
    return out;
}

inline LinearizedProgram build_p3(const Scenario& s, const Surrogate& sur)
{
    return build_program(s, sur, sur.expectation_rule);
}

inline IntegerProgram build_p3(const Scenario& s, int max_order = 3)
{
    return build_p3(s, build_surrogate(s, {.max_order = max_order})).ip;
}

inline LinearizedProgram build_p4(const Scenario& s, const Surrogate& sur)
{
    return build_program(s, sur, UpperBoundWeights{});
}

// ---------------------------------------------------------------- 0-1 solver

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CuttingPlaneOptions {
    std::size_t max_cuts = 500;
    // A cut with a larger coefficient ends the cut phase; branch and bound
    // finishes from there.
    std::int64_t max_cut_coefficient = 1'000'000;
    std::size_t max_nodes = 200'000;
    lp::SimplexOptions lp{};
};

struct IpResult {
    std::vector<std::uint8_t> n;
    double objective = 0.0;
    std::size_t cuts_added = 0;
    std::size_t nodes = 0;  // branch-and-bound nodes, 0 when cuts sufficed
};

namespace detail {

using lp::Rational;

struct SubProblem {
    std::vector<std::size_t> vars;
    std::vector<double> c;
    std::vector<Rational> c_exact;
    lp::DenseMatrix<std::int64_t> A;
    std::vector<std::int64_t> b;
};

/// Variables linked through shared rows form independent subproblems.
inline std::vector<SubProblem> split_components(const IntegerProgram& ip)
{
    const std::size_t n = ip.num_variables();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<std::int64_t> b_int(ip.num_rows());
    for (std::size_t r = 0; r < ip.num_rows(); ++r) {
        const double f = std::floor(ip.b[r]);
        if (!std::isfinite(f) || std::abs(f) > 1e15)
            throw std::invalid_argument("solve_cutting_plane: right-hand side out of range");
        b_int[r] = static_cast<std::int64_t>(f);
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < n; ++i) {
            if (ip.A[r][i] == 0)
                continue;
            if (first)
                parent[find(i)] = find(*first);
            else
                first = i;
        }
        if (!first && b_int[r] < 0)
            throw lp::LpError(lp::LpStatus::infeasible, "solve_cutting_plane: empty row with negative bound");
    }
    std::vector<long> comp_of(n, -1);
    std::vector<SubProblem> comps;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (comp_of[root] < 0) {
            comp_of[root] = static_cast<long>(comps.size());
            comps.emplace_back();
        }
        auto& sp = comps[static_cast<std::size_t>(comp_of[root])];
        sp.vars.push_back(i);
        sp.c.push_back(ip.c[i]);
        sp.c_exact.emplace_back(ip.c[i]);
    }
    std::vector<std::size_t> local(n);
    for (const auto& sp : comps)
        for (std::size_t t = 0; t < sp.vars.size(); ++t)
            local[sp.vars[t]] = t;
    for (std::size_t r = 0; r < ip.num_rows(); ++r) {
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < n && !first; ++i)
            if (ip.A[r][i] != 0)
                first = i;
        if (!first)
            continue;
        auto& sp = comps[static_cast<std::size_t>(comp_of[find(*first)])];
        std::vector<std::int64_t> row(sp.vars.size(), 0);
        for (std::size_t i = 0; i < n; ++i)
            if (ip.A[r][i] != 0)
                row[local[i]] = ip.A[r][i];
        sp.A.push_back(std::move(row));
        sp.b.push_back(b_int[r]);
    }
    return comps;
}

struct ExactVertex {
    std::vector<int> basis;
    std::vector<Rational> values;  // structural then slack
    Rational objective;
};

/// Optimal vertex of the relaxation, certified in exact arithmetic; the
/// rational simplex takes over when the floating-point basis fails the
/// certificate. Empty when infeasible.
inline std::optional<ExactVertex> exact_relaxation(const SubProblem& sp, const lp::DenseMatrix<std::int64_t>& A,
                                                   const std::vector<std::int64_t>& b, const lp::SimplexOptions& opt)
{
    const std::size_t n = sp.c.size();
    const std::size_t m = A.size();
    auto certify = [&](const std::vector<int>& basis) -> std::optional<ExactVertex> {
        try {
            const lp::BasisFactor f(A, b, basis);
            auto values = f.primal();
            for (const auto& v : values)
                if (sgn(v) < 0)
                    return std::nullopt;
            for (const auto& d : f.reduced_costs(sp.c_exact))
                if (sgn(d) > 0)
                    return std::nullopt;
            ExactVertex ev{basis, std::move(values), Rational(0)};
            for (std::size_t j = 0; j < n; ++j)
                if (sgn(ev.values[j]) != 0)
                    ev.objective += sp.c_exact[j] * ev.values[j];
            return ev;
        } catch (const std::runtime_error&) {
            return std::nullopt;  // singular basis
        }
    };

    lp::DenseMatrix<double> Ad(m, std::vector<double>(n));
    std::vector<double> bd(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j)
            Ad[r][j] = static_cast<double>(A[r][j]);
        bd[r] = static_cast<double>(b[r]);
    }
    try {
        auto sol = lp::simplex_solve(sp.c, Ad, bd, opt);
        if (auto ev = certify(sol.basis))
            return ev;
        // Usually primal feasible and a few pivots short of optimal.
        auto exact = lp::simplex_from_basis(sp.c_exact, A, b, sol.basis, opt);
        if (auto ev = certify(exact.basis))
            return ev;
    } catch (const lp::LpError& e) {
        if (e.status() == lp::LpStatus::unbounded)
            throw;
    } catch (const std::invalid_argument&) {
        // Floating-point basis infeasible in exact arithmetic.
    } catch (const std::runtime_error&) {
        // Singular basis.
    }

    lp::DenseMatrix<Rational> Aq(m, std::vector<Rational>(n));
    std::vector<Rational> bq(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j)
            Aq[r][j] = static_cast<long>(A[r][j]);
        bq[r] = static_cast<long>(b[r]);
    }
    try {
        auto sol = lp::simplex_solve(sp.c_exact, Aq, bq, opt);
        auto ev = certify(sol.basis);
        if (!ev)
            throw SolverFailure("exact simplex returned an uncertified basis");
        return ev;
    } catch (const lp::LpError& e) {
        if (e.status() == lp::LpStatus::infeasible)
            return std::nullopt;
        throw;
    }
}

inline bool is_integral(const Rational& q)
{
    return q.get_den() == 1;
}

/// Basis position of the basic variable whose fractional part is closest to 1/2.
inline std::optional<std::size_t> most_fractional_row(const ExactVertex& v)
{
    std::optional<std::size_t> best;
    Rational best_dist;
    const Rational half(1, 2);
    for (std::size_t p = 0; p < v.basis.size(); ++p) {
        const auto& x = v.values[static_cast<std::size_t>(v.basis[p])];
        if (is_integral(x))
            continue;
        const Rational dist = abs(lp::fractional_part(x) - half);
        if (!best || dist < best_dist) {
            best = p;
            best_dist = dist;
        }
    }
    return best;
}

inline std::vector<std::uint8_t> round_structural(const ExactVertex& v, std::size_t n)
{
    std::vector<std::uint8_t> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (!is_integral(v.values[j]) || v.values[j] < 0 || v.values[j] > 1)
            throw SolverFailure("integral vertex is not binary");
        out[j] = v.values[j] == 1 ? 1 : 0;
    }
    return out;
}

inline std::vector<std::uint8_t> branch_and_bound(const SubProblem& sp, lp::DenseMatrix<std::int64_t> A,
                                                  std::vector<std::int64_t> b, const CuttingPlaneOptions& opt,
                                                  std::size_t& nodes)
{
    const std::size_t n = sp.c.size();
    struct Node {
        std::vector<std::pair<std::size_t, bool>> fixes;  // (variable, set to one)
    };
    std::vector<Node> stack{Node{}};
    std::optional<std::vector<std::uint8_t>> incumbent;
    Rational best;
    const std::size_t base_rows = A.size();
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (++nodes > opt.max_nodes)
            throw SolverFailure("branch and bound exceeded its node limit");
        A.resize(base_rows);
        b.resize(base_rows);
        for (const auto& [var, one] : node.fixes) {
            std::vector<std::int64_t> row(n, 0);
            row[var] = one ? -1 : 1;
            A.push_back(std::move(row));
            b.push_back(one ? -1 : 0);
        }
        auto v = exact_relaxation(sp, A, b, opt.lp);
        if (!v || (incumbent && v->objective <= best))
            continue;
        std::optional<std::size_t> branch;
        Rational branch_dist;
        const Rational half(1, 2);
        for (std::size_t j = 0; j < n; ++j) {
            if (is_integral(v->values[j]))
                continue;
            const Rational dist = abs(lp::fractional_part(v->values[j]) - half);
            if (!branch || dist < branch_dist) {
                branch = j;
                branch_dist = dist;
            }
        }
        if (!branch) {
            incumbent = round_structural(*v, n);
            best = v->objective;
            continue;
        }
        Node down = node, up = std::move(node);
        down.fixes.emplace_back(*branch, false);
        up.fixes.emplace_back(*branch, true);
        stack.push_back(std::move(down));
        stack.push_back(std::move(up));
    }
    if (!incumbent)
        throw lp::LpError(lp::LpStatus::infeasible, "0-1 program is infeasible");
    return *incumbent;
}

inline bool cut_too_large(const lp::IntegerCut& cut, std::int64_t limit)
{
    if (cut.rhs > limit || cut.rhs < -limit)
        return true;
    for (auto a : cut.coeffs)
        if (a > limit || a < -limit)
            return true;
    return false;
}

inline std::vector<std::uint8_t> solve_component(const SubProblem& sp, const CuttingPlaneOptions& opt,
                                                 std::size_t& cuts, std::size_t& nodes)
{
    const std::size_t n = sp.c.size();
    if (sp.A.empty()) {
        for (double c : sp.c)
            if (c > 0.0)
                throw lp::LpError(lp::LpStatus::unbounded, "0-1 program: unconstrained variable with positive cost");
        return std::vector<std::uint8_t>(n, 0);
    }
    auto A = sp.A;
    auto b = sp.b;
    std::size_t local_cuts = 0;
    while (true) {
        auto v = exact_relaxation(sp, A, b, opt.lp);
        if (!v)
            throw lp::LpError(lp::LpStatus::infeasible, "0-1 program is infeasible");
        const auto p = most_fractional_row(*v);
        if (!p)
            return round_structural(*v, n);
        if (local_cuts >= opt.max_cuts)
            break;
        const lp::BasisFactor f(A, b, v->basis);
        auto [row, rhs] = f.tableau_row(*p);
        const auto cut = lp::structural_cut(lp::gomory_cut(row, rhs), A, b);
        if (!cut || cut_too_large(*cut, opt.max_cut_coefficient))
            break;
        A.push_back(cut->coeffs);
        b.push_back(cut->rhs);
        ++local_cuts;
        ++cuts;
    }
    return branch_and_bound(sp, std::move(A), std::move(b), opt, nodes);
}

}  // namespace detail

/// Maximizes c.n over binary n with A n <= floor(b). Cuts are derived from
/// exactly reconstructed tableau rows, so they never remove an integer
/// point. Throws lp::LpError when infeasible.
inline IpResult solve_cutting_plane(const IntegerProgram& ip, const CuttingPlaneOptions& opt = {})
{
    ip.validate();
    IpResult res;
    res.n.assign(ip.num_variables(), 0);
    for (const auto& sp : detail::split_components(ip)) {
        const auto part = detail::solve_component(sp, opt, res.cuts_added, res.nodes);
        for (std::size_t t = 0; t < sp.vars.size(); ++t)
            res.n[sp.vars[t]] = part[t];
    }
    if (!ip.feasible(res.n))
        throw SolverFailure("cutting plane produced an infeasible point");
    res.objective = ip.value(res.n);
    return res;
}

/// Solves the relaxation once and requires an integral optimum.
inline IpResult solve_lp_integral(const IntegerProgram& ip, double tolerance = 1e-6,
                                  const lp::SimplexOptions& opt = {})
{
    ip.validate();
    lp::DenseMatrix<double> A(ip.num_rows(), std::vector<double>(ip.num_variables()));
    for (std::size_t r = 0; r < ip.num_rows(); ++r)
        for (std::size_t j = 0; j < ip.num_variables(); ++j)
            A[r][j] = static_cast<double>(ip.A[r][j]);
    const auto sol = lp::simplex_solve(ip.c, A, ip.b, opt);
    IpResult res;
    res.n.resize(ip.num_variables());
    for (std::size_t j = 0; j < ip.num_variables(); ++j) {
        const double r = std::round(sol.x[j]);
        if (std::abs(sol.x[j] - r) >= tolerance)
            throw SolverFailure("relaxation optimum is fractional at variable " + std::to_string(j));
        res.n[j] = r > 0.5 ? 1 : 0;
    }
    if (!ip.feasible(res.n))
        throw SolverFailure("rounded relaxation optimum is infeasible");
    res.objective = ip.value(res.n);
    return res;
}

// ---------------------------------------------------------------- reports

enum class Method { cutting_plane, lp_unimodular, heuristic, brute_force, upper_bound_p4, no_nulling };

inline constexpr std::string_view method_name(Method m)
{
    switch (m) {
        case Method::cutting_plane: return "cutting_plane";
        case Method::lp_unimodular: return "lp_unimodular";
        case Method::heuristic: return "heuristic";
        case Method::brute_force: return "brute_force";
        case Method::upper_bound_p4: return "upper_bound_p4";
        case Method::no_nulling: return "no_nulling";
    }
    return "unknown";
}

inline Method parse_method(std::string_view name)
{
    for (auto m : {Method::cutting_plane, Method::lp_unimodular, Method::heuristic, Method::brute_force,
                   Method::upper_bound_p4, Method::no_nulling})
        if (method_name(m) == name)
            return m;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

inline constexpr bool needs_surrogate(Method m)
{
    return m == Method::cutting_plane || m == Method::lp_unimodular || m == Method::upper_bound_p4;
}

struct SolveReport {
    NullingAssignment assignment;
    Method method = Method::no_nulling;
    double objective_linearized = std::numeric_limits<double>::quiet_NaN();
    double objective_surrogate = std::numeric_limits<double>::quiet_NaN();
    double objective_exact_rate = 0.0;  // bits/s/Hz
    std::size_t cuts_added = 0;
    double solve_time_ms = 0.0;
    std::optional<NullingAssignment> p2_maximizer;  // brute force only
};

struct SolverOptions {
    SurrogateOptions surrogate{};
    CuttingPlaneOptions cutting_plane{};
    double integrality_tolerance = 1e-6;
    int brute_force_limit = 22;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline SolveReport finish(const Scenario& s, Method m, NullingAssignment n, const Surrogate* sur,
                          const Stopwatch& clock)
{
    SolveReport r;
    r.method = m;
    r.objective_exact_rate = sum_rate_bits(s, n);
    if (sur)
        r.objective_surrogate = sur->value(n);
    r.assignment = std::move(n);
    r.solve_time_ms = clock.ms();
    return r;
}

inline SolveReport from_program(const Scenario& s, Method m, const LinearizedProgram& prog, const IpResult& res,
                                const Surrogate& sur, const Stopwatch& clock)
{
    auto r = finish(s, m, NullingAssignment::from_stacked(s.num_users(), s.num_bs(), res.n), &sur, clock);
    r.objective_linearized = prog.objective.value(std::span<const std::uint8_t>(res.n));
    r.cuts_added = res.cuts_added;
    return r;
}

}  // namespace detail

inline SolveReport solve_no_nulling(const Scenario& s, const Surrogate* sur = nullptr)
{
    const detail::Stopwatch clock;
    return detail::finish(s, Method::no_nulling, NullingAssignment::zeros(s), sur, clock);
}

/// Each BS nulls unserved users in order of received power (ties by
/// index) and stops at the first one that no longer fits its budget.
inline NullingAssignment heuristic_assignment(const Scenario& s)
{
    auto n = NullingAssignment::zeros(s);
    for (int j = 0; j < s.num_bs(); ++j) {
        std::vector<int> cand;
        for (int k = 0; k < s.num_users(); ++k)
            if (!s.x(k, j))
                cand.push_back(k);
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
            return s.user_power(a) * s.gain(a, j) > s.user_power(b) * s.gain(b, j);
        });
        int rows = s.base_load(j) + 1;
        for (int k : cand) {
            if (!fits_dof_budget(static_cast<std::size_t>(rows + s.q(k, j)), static_cast<std::size_t>(s.dof(j))))
                break;
            rows += s.q(k, j);
            n.set(k, j, 1);
        }
    }
    return n;
}

inline SolveReport solve_heuristic(const Scenario& s, const Surrogate* sur = nullptr)
{
    const detail::Stopwatch clock;
    return detail::finish(s, Method::heuristic, heuristic_assignment(s), sur, clock);
}

inline SolveReport solve_cutting_plane(const Scenario& s, const Surrogate& sur, const SolverOptions& opt = {})
{
    const detail::Stopwatch clock;
    const auto prog = build_p3(s, sur);
    const auto res = solve_cutting_plane(prog.ip, opt.cutting_plane);
    return detail::from_program(s, Method::cutting_plane, prog, res, sur, clock);
}

/// Special case of one common path count per BS: all-ones budget rows,
/// one relaxation solve. Throws NotSpecialCase otherwise.
inline SolveReport solve_unimodular(const Scenario& s, const Surrogate& sur, const SolverOptions& opt = {})
{
    const detail::Stopwatch clock;
    auto prog = build_p3(s, sur);
    prog.ip.A = unimodular_rows(s).A;
    prog.ip.b = unimodular_rows(s).b;
    const auto res = solve_lp_integral(prog.ip, opt.integrality_tolerance, opt.cutting_plane.lp);
    return detail::from_program(s, Method::lp_unimodular, prog, res, sur, clock);
}

/// Maximizes the upper-bound linearization. objective_linearized is the
/// bound; objective_surrogate the surrogate at the returned point.
inline SolveReport solve_upper_bound_p4(const Scenario& s, const Surrogate& sur, const SolverOptions& opt = {})
{
    const detail::Stopwatch clock;
    const auto prog = build_p4(s, sur);
    const auto res = solve_cutting_plane(prog.ip, opt.cutting_plane);
    return detail::from_program(s, Method::upper_bound_p4, prog, res, sur, clock);
}

class ProblemTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Exhaustive search over feasible assignments: the maximizer of the exact
/// sum rate in `assignment` and of the negated product in `p2_maximizer`.
/// The first maximizer in enumeration order wins ties.
inline SolveReport solve_brute_force(const Scenario& s, const Surrogate* sur = nullptr, int limit = 22)
{
    const detail::Stopwatch clock;
    const int K = s.num_users();
    if (K * s.num_bs() > limit)
        throw ProblemTooLarge("brute force limited to " + std::to_string(limit) + " variables, scenario has " +
                              std::to_string(K * s.num_bs()));
    std::vector<std::pair<int, int>> free;
    for (int j = 0; j < s.num_bs(); ++j)
        for (int k = 0; k < K; ++k)
            if (!s.x(k, j))
                free.emplace_back(k, j);
    std::vector<int> rows(static_cast<std::size_t>(s.num_bs()));
    for (int j = 0; j < s.num_bs(); ++j)
        rows[static_cast<std::size_t>(j)] = s.base_load(j) + 1;

    auto n = NullingAssignment::zeros(s);
    NullingAssignment best_rate = n, best_p2 = n;
    double best_rate_value = -std::numeric_limits<double>::infinity();
    double best_p2_value = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t)> visit = [&](std::size_t idx) {
        if (idx == free.size()) {
            double r = 0.0;
            for (int k = 0; k < K; ++k)
                r += user_rate(s, n, k);
            if (r > best_rate_value) {
                best_rate_value = r;
                best_rate = n;
            }
            const double lp = p2_log_product(s, n);
            if (lp < best_p2_value) {
                best_p2_value = lp;
                best_p2 = n;
            }
            return;
        }
        const auto [k, j] = free[idx];
        visit(idx + 1);
        auto& used = rows[static_cast<std::size_t>(j)];
        if (fits_dof_budget(static_cast<std::size_t>(used + s.q(k, j)), static_cast<std::size_t>(s.dof(j)))) {
            used += s.q(k, j);
            n.set(k, j, 1);
            visit(idx + 1);
            n.set(k, j, 0);
            used -= s.q(k, j);
        }
    };
    visit(0);
    auto r = detail::finish(s, Method::brute_force, best_rate, sur, clock);
    r.p2_maximizer = best_p2;
    return r;
}

/// Runs one method; surrogate-based methods build the surrogate when none
/// is supplied.
inline SolveReport solve(const Scenario& s, Method m, const SolverOptions& opt = {}, const Surrogate* sur = nullptr)
{
    std::optional<Surrogate> own;
    if (!sur && needs_surrogate(m)) {
        own = build_surrogate(s, opt.surrogate);
        sur = &*own;
    }
    switch (m) {
        case Method::cutting_plane: return solve_cutting_plane(s, *sur, opt);
        case Method::lp_unimodular: return solve_unimodular(s, *sur, opt);
        case Method::heuristic: return solve_heuristic(s, sur);
        case Method::brute_force: return solve_brute_force(s, sur, opt.brute_force_limit);
        case Method::upper_bound_p4: return solve_upper_bound_p4(s, *sur, opt);
        case Method::no_nulling: return solve_no_nulling(s, sur);
    }
    throw std::invalid_argument("solve: unknown method");
}

}  // namespace nestnull::opt
