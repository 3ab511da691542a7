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
 * @file simplex.hpp
 * Dense two-phase primal simplex for  max c.x  s.t.  A x <= b, x >= 0,
 * over double or exact rationals (GMP mpq), plus exact tableau
 * reconstruction from a basis and Gomory cut derivation.
 *
 * Columns of the working matrix are [structural | slack]; slack i belongs
 * to row i. Pricing is Dantzig's rule, switching to Bland's rule after a
 * degenerate pivot. Rational mode always uses Bland's rule.
 */
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestnull::lp {

using Rational = mpq_class;
template <class T>
using DenseMatrix = std::vector<std::vector<T>>;

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

class LpError : public std::runtime_error {
public:
    LpError(LpStatus status, const std::string& what) : std::runtime_error(what), status_(status) {}
    [[nodiscard]] LpStatus status() const { return status_; }

private:
    LpStatus status_;
};

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static constexpr bool exact = false;
    static bool positive(double x, double tol) { return x > tol; }
    static bool negative(double x, double tol) { return x < -tol; }
    static double to_double(double x) { return x; }
    static double from_double(double x) { return x; }
    static double abs(double x) { return std::abs(x); }
};

template <>
struct ScalarOps<Rational> {
    static constexpr bool exact = true;
    static bool positive(const Rational& x, double) { return sgn(x) > 0; }
    static bool negative(const Rational& x, double) { return sgn(x) < 0; }
    static double to_double(const Rational& x) { return x.get_d(); }
    static Rational from_double(double x) { return Rational(x); }
    static Rational abs(const Rational& x) { return ::abs(x); }
};

struct SimplexOptions {
    double tolerance = 1e-9;  // ignored in rational mode
    std::size_t max_pivots = 200'000;
};

template <class T>
struct LpSolution {
    std::vector<T> x;          // structural values
    T value{};                 // c . x
    std::vector<int> basis;    // basis[r]: column basic in row r ([structural | slack] indexing)
    std::size_t pivots = 0;
};

namespace detail {

template <class T>
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols), rhs_(rows), basis_(rows) {}

    T& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const T& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    T& rhs(std::size_t r) { return rhs_[r]; }
    int& basic(std::size_t r) { return basis_[r]; }
    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] const std::vector<int>& basis() const { return basis_; }

    void pivot(std::size_t pr, std::size_t pc, std::vector<T>& reduced, T& objective, double tol)
    {
        using Ops = ScalarOps<T>;
        const T inv = T(1) / at(pr, pc);
        for (std::size_t c = 0; c < cols_; ++c)
            if (!is_zero(at(pr, c)))
                at(pr, c) *= inv;
        rhs_[pr] *= inv;
        at(pr, pc) = T(1);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr)
                continue;
            const T f = at(r, pc);
            if (is_zero(f))
                continue;
            for (std::size_t c = 0; c < cols_; ++c) {
                const T& p = at(pr, c);
                if (!is_zero(p))
                    at(r, c) -= f * p;
            }
            at(r, pc) = T(0);
            rhs_[r] -= f * rhs_[pr];
            if constexpr (!Ops::exact)
                if (rhs_[r] < 0 && rhs_[r] > -tol)
                    rhs_[r] = 0;
        }
        const T f = reduced[pc];
        if (!is_zero(f)) {
            for (std::size_t c = 0; c < cols_; ++c) {
                const T& p = at(pr, c);
                if (!is_zero(p))
                    reduced[c] -= f * p;
            }
            reduced[pc] = T(0);
            objective += f * rhs_[pr];
        }
        basis_[pr] = static_cast<int>(pc);
    }

    static bool is_zero(const T& x)
    {
        if constexpr (ScalarOps<T>::exact)
            return sgn(x) == 0;
        else
            return x == 0.0;
    }

private:
    std::size_t rows_, cols_;
    std::vector<T> a_;
    std::vector<T> rhs_;
    std::vector<int> basis_;
};

/// Runs simplex iterations on the tableau for reduced costs `reduced`
/// (maximization: a positive reduced cost improves). Columns with
/// `allowed[c] == false` never enter.
template <class T>
LpStatus iterate(Tableau<T>& tab, std::vector<T>& reduced, T& objective, const std::vector<bool>& allowed,
                 const SimplexOptions& opt, std::size_t& pivots)
{
    using Ops = ScalarOps<T>;
    bool bland = Ops::exact;
    const double tol = opt.tolerance;
    while (true) {
        if (pivots >= opt.max_pivots)
            return LpStatus::iteration_limit;
        std::optional<std::size_t> enter;
        for (std::size_t c = 0; c < tab.cols(); ++c) {
            if (!allowed[c] || !Ops::positive(reduced[c], tol))
                continue;
            if (bland) {
                enter = c;
                break;
            }
            if (!enter || reduced[c] > reduced[*enter])
                enter = c;
        }
        if (!enter)
            return LpStatus::optimal;
        const std::size_t pc = *enter;

        std::optional<std::size_t> leave;
        T best_ratio{};
        for (std::size_t r = 0; r < tab.rows(); ++r) {
            const T& a = tab.at(r, pc);
            if (!Ops::positive(a, tol))
                continue;
            T ratio = tab.rhs(r) / a;
            if (!leave) {
                leave = r;
                best_ratio = ratio;
                continue;
            }
            bool better;
            if constexpr (Ops::exact)
                better = ratio < best_ratio || (ratio == best_ratio && tab.basic(r) < tab.basic(*leave));
            else
                better = ratio < best_ratio - tol ||
                         (ratio <= best_ratio + tol && tab.basic(r) < tab.basic(*leave));
            if (better) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (!leave)
            return LpStatus::unbounded;
        const bool degenerate = !Ops::positive(best_ratio, tol);
        tab.pivot(*leave, pc, reduced, objective, tol);
        ++pivots;
        if constexpr (!Ops::exact)
            bland = degenerate;
    }
}

}  // namespace detail

/// Solves max c.x s.t. A x <= b, x >= 0. Throws LpError when infeasible,
/// unbounded or out of pivots.
template <class T>
LpSolution<T> simplex_solve(const std::vector<T>& c, const DenseMatrix<T>& A, const std::vector<T>& b,
                            const SimplexOptions& opt = {})
{
    using Ops = ScalarOps<T>;
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    if (b.size() != m)
        throw std::invalid_argument("simplex_solve: b must have one entry per row of A");
    for (const auto& row : A)
        if (row.size() != n)
            throw std::invalid_argument("simplex_solve: every row of A needs one entry per variable");

    std::vector<std::size_t> art_rows;
    for (std::size_t r = 0; r < m; ++r)
        if (Ops::negative(b[r], 0.0))
            art_rows.push_back(r);
    const std::size_t base_cols = n + m;
    const std::size_t cols = base_cols + art_rows.size();

    detail::Tableau<T> tab(m, cols);
    for (std::size_t r = 0; r < m; ++r) {
        const bool flip = Ops::negative(b[r], 0.0);
        for (std::size_t j = 0; j < n; ++j)
            tab.at(r, j) = flip ? T(-A[r][j]) : A[r][j];
        tab.at(r, n + r) = flip ? T(-1) : T(1);
        tab.rhs(r) = flip ? T(-b[r]) : b[r];
        tab.basic(r) = static_cast<int>(n + r);
    }
    for (std::size_t a = 0; a < art_rows.size(); ++a) {
        const std::size_t r = art_rows[a];
        tab.at(r, base_cols + a) = T(1);
        tab.basic(r) = static_cast<int>(base_cols + a);
    }

    LpSolution<T> sol;
    std::vector<bool> allowed(cols, true);

    if (!art_rows.empty()) {
        // Phase I: maximize -sum(artificials).
        std::vector<T> reduced(cols, T(0));
        T objective(0);
        for (std::size_t a = 0; a < art_rows.size(); ++a) {
            const std::size_t r = art_rows[a];
            for (std::size_t col = 0; col < base_cols; ++col)
                reduced[col] += tab.at(r, col);
            objective -= tab.rhs(r);
        }
        const auto st = detail::iterate(tab, reduced, objective, allowed, opt, sol.pivots);
        if (st == LpStatus::iteration_limit)
            throw LpError(st, "simplex: pivot limit reached in phase I");
        if (Ops::negative(objective, opt.tolerance * std::max<double>(1.0, static_cast<double>(m))))
            throw LpError(LpStatus::infeasible, "simplex: problem is infeasible");
        // Drive remaining artificials out of the basis.
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basic(r) < static_cast<int>(base_cols))
                continue;
            std::optional<std::size_t> pc;
            for (std::size_t col = 0; col < base_cols; ++col) {
                const auto mag = Ops::abs(tab.at(r, col));
                if (Ops::positive(mag, opt.tolerance) && (!pc || mag > Ops::abs(tab.at(r, *pc))))
                    pc = col;
            }
            if (!pc)
                throw LpError(LpStatus::infeasible, "simplex: degenerate phase I basis");
            tab.pivot(r, *pc, reduced, objective, opt.tolerance);
            ++sol.pivots;
        }
        for (std::size_t col = base_cols; col < cols; ++col)
            allowed[col] = false;
    }

    // Phase II.
    std::vector<T> reduced(cols, T(0));
    for (std::size_t j = 0; j < n; ++j)
        reduced[j] = c[j];
    T objective(0);
    for (std::size_t r = 0; r < m; ++r) {
        const auto bc = static_cast<std::size_t>(tab.basic(r));
        if (bc >= n)
            continue;
        const T cb = c[bc];
        if (detail::Tableau<T>::is_zero(cb))
            continue;
        for (std::size_t col = 0; col < cols; ++col)
            reduced[col] -= cb * tab.at(r, col);
        objective += cb * tab.rhs(r);
    }
    for (std::size_t r = 0; r < m; ++r)
        reduced[static_cast<std::size_t>(tab.basic(r))] = T(0);

    const auto st = detail::iterate(tab, reduced, objective, allowed, opt, sol.pivots);
    if (st == LpStatus::unbounded)
        throw LpError(st, "simplex: problem is unbounded");
    if (st == LpStatus::iteration_limit)
        throw LpError(st, "simplex: pivot limit reached");

    sol.x.assign(n, T(0));
    for (std::size_t r = 0; r < m; ++r) {
        const auto bc = static_cast<std::size_t>(tab.basic(r));
        if (bc < n)
            sol.x[bc] = tab.rhs(r);
    }
    sol.value = T(0);
    for (std::size_t j = 0; j < n; ++j)
        sol.value += c[j] * sol.x[j];
    sol.basis = tab.basis();
    return sol;
}

// ---------------------------------------------------------------- exact basis

/**
 * Exact view of a basis of [A | I] for an integer system A x <= b.
 *
 * Basic slacks have unit columns, so only the square block of A on the
 * rows with nonbasic slack and the basic structural columns is factored.
 */
class BasisFactor {
public:
    BasisFactor(const DenseMatrix<std::int64_t>& A, const std::vector<std::int64_t>& b, std::vector<int> basis)
        : A_(&A), b_(&b), basis_(std::move(basis)), m_(A.size()), n_(m_ ? A[0].size() : 0)
    {
        if (basis_.size() != m_ || b.size() != m_)
            throw std::invalid_argument("BasisFactor: basis and b need one entry per row");
        std::vector<std::uint8_t> slack_basic(m_, 0);
        std::vector<std::uint8_t> seen(n_ + m_, 0);
        for (std::size_t p = 0; p < m_; ++p) {
            const auto col = static_cast<std::size_t>(basis_[p]);
            if (basis_[p] < 0 || col >= n_ + m_ || seen[col])
                throw std::invalid_argument("BasisFactor: basis columns must be distinct and in range");
            seen[col] = 1;
            if (col < n_)
                cols_.push_back(col);
            else
                slack_basic[col - n_] = 1;
        }
        for (std::size_t i = 0; i < m_; ++i)
            if (!slack_basic[i])
                rows_.push_back(i);
        const std::size_t k = cols_.size();
        lu_.assign(k, std::vector<Rational>(k));
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) {
                const auto a = A[rows_[r]][cols_[c]];
                if (a != 0)
                    lu_[r][c] = Rational(static_cast<long>(a));
            }
        factor();
    }

    [[nodiscard]] std::size_t rows() const { return m_; }
    [[nodiscard]] std::size_t structural() const { return n_; }
    [[nodiscard]] const std::vector<int>& basis() const { return basis_; }

    /// Values of all n + m variables at the basic solution.
    [[nodiscard]] std::vector<Rational> primal() const
    {
        std::vector<Rational> rhs(cols_.size());
        for (std::size_t r = 0; r < rows_.size(); ++r)
            rhs[r] = Rational(static_cast<long>((*b_)[rows_[r]]));
        const auto xn = solve(rhs);
        std::vector<Rational> v(n_ + m_);
        for (std::size_t c = 0; c < cols_.size(); ++c)
            v[cols_[c]] = xn[c];
        for (std::size_t i = 0; i < m_; ++i) {
            Rational s(static_cast<long>((*b_)[i]));
            for (std::size_t c = 0; c < cols_.size(); ++c)
                if ((*A_)[i][cols_[c]] != 0)
                    s -= static_cast<long>((*A_)[i][cols_[c]]) * xn[c];
            v[n_ + i] = s;
        }
        return v;
    }

    /// Row duals y (length m) for structural costs c: y B = c_B.
    [[nodiscard]] std::vector<Rational> duals(const std::vector<Rational>& c) const
    {
        std::vector<Rational> cb(cols_.size());
        for (std::size_t t = 0; t < cols_.size(); ++t)
            cb[t] = c[cols_[t]];
        const auto yr = solve_transposed(cb);
        std::vector<Rational> y(m_);
        for (std::size_t r = 0; r < rows_.size(); ++r)
            y[rows_[r]] = yr[r];
        return y;
    }

    /// Reduced costs c_j - y A_j over [structural | slack].
    [[nodiscard]] std::vector<Rational> reduced_costs(const std::vector<Rational>& c) const
    {
        const auto y = duals(c);
        std::vector<Rational> d(n_ + m_);
        for (std::size_t j = 0; j < n_; ++j) {
            Rational s = c[j];
            for (std::size_t i = 0; i < m_; ++i)
                if ((*A_)[i][j] != 0 && sgn(y[i]) != 0)
                    s -= y[i] * static_cast<long>((*A_)[i][j]);
            d[j] = s;
        }
        for (std::size_t i = 0; i < m_; ++i)
            d[n_ + i] = -y[i];
        return d;
    }

    /// B^-1 times column j of [A | I], indexed by basis position.
    [[nodiscard]] std::vector<Rational> column(std::size_t j) const
    {
        auto entry = [&](std::size_t i) -> long {
            if (j < n_)
                return static_cast<long>((*A_)[i][j]);
            return i == j - n_ ? 1 : 0;
        };
        std::vector<Rational> rhs(cols_.size());
        for (std::size_t r = 0; r < rows_.size(); ++r)
            rhs[r] = entry(rows_[r]);
        const auto an = solve(rhs);
        std::vector<Rational> by_col(n_ + m_);
        for (std::size_t t = 0; t < cols_.size(); ++t)
            by_col[cols_[t]] = an[t];
        for (std::size_t i = 0; i < m_; ++i) {
            Rational v(entry(i));
            for (std::size_t t = 0; t < cols_.size(); ++t)
                if ((*A_)[i][cols_[t]] != 0 && sgn(an[t]) != 0)
                    v -= static_cast<long>((*A_)[i][cols_[t]]) * an[t];
            by_col[n_ + i] = v;
        }
        std::vector<Rational> out(m_);
        for (std::size_t p = 0; p < m_; ++p)
            out[p] = by_col[static_cast<std::size_t>(basis_[p])];
        return out;
    }

    /// Row p of B^-1 [A | I] and its right-hand side.
    [[nodiscard]] std::pair<std::vector<Rational>, Rational> tableau_row(std::size_t p) const
    {
        const auto basic_col = static_cast<std::size_t>(basis_.at(p));
        std::vector<Rational> u(m_);
        std::vector<Rational> rhs(cols_.size());
        if (basic_col >= n_) {
            const std::size_t i = basic_col - n_;
            u[i] = 1;
            for (std::size_t t = 0; t < cols_.size(); ++t) {
                const auto a = (*A_)[i][cols_[t]];
                if (a != 0)
                    rhs[t] = -a;
            }
        } else {
            for (std::size_t t = 0; t < cols_.size(); ++t)
                if (cols_[t] == basic_col)
                    rhs[t] = 1;
        }
        const auto ur = solve_transposed(rhs);
        for (std::size_t r = 0; r < rows_.size(); ++r)
            u[rows_[r]] = ur[r];
        std::vector<Rational> row(n_ + m_);
        Rational value;
        for (std::size_t i = 0; i < m_; ++i) {
            if (sgn(u[i]) == 0)
                continue;
            for (std::size_t j = 0; j < n_; ++j)
                if ((*A_)[i][j] != 0)
                    row[j] += u[i] * static_cast<long>((*A_)[i][j]);
            row[n_ + i] = u[i];
            value += u[i] * static_cast<long>((*b_)[i]);
        }
        return {std::move(row), std::move(value)};
    }

private:
    void factor()
    {
        const std::size_t k = lu_.size();
        perm_.resize(k);
        for (std::size_t i = 0; i < k; ++i)
            perm_[i] = i;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t p = c;
            while (p < k && sgn(lu_[p][c]) == 0)
                ++p;
            if (p == k)
                throw std::runtime_error("BasisFactor: basis matrix is singular");
            std::swap(lu_[c], lu_[p]);
            std::swap(perm_[c], perm_[p]);
            for (std::size_t r = c + 1; r < k; ++r) {
                if (sgn(lu_[r][c]) == 0)
                    continue;
                lu_[r][c] /= lu_[c][c];
                const Rational& f = lu_[r][c];
                for (std::size_t j = c + 1; j < k; ++j)
                    if (sgn(lu_[c][j]) != 0)
                        lu_[r][j] -= f * lu_[c][j];
            }
        }
    }

    /// M x = rhs with M the core block (rows in rows_ order).
    [[nodiscard]] std::vector<Rational> solve(const std::vector<Rational>& rhs) const
    {
        const std::size_t k = lu_.size();
        std::vector<Rational> y(k);
        for (std::size_t i = 0; i < k; ++i) {
            y[i] = rhs[perm_[i]];
            for (std::size_t j = 0; j < i; ++j)
                if (sgn(lu_[i][j]) != 0)
                    y[i] -= lu_[i][j] * y[j];
        }
        for (std::size_t i = k; i-- > 0;) {
            for (std::size_t j = i + 1; j < k; ++j)
                if (sgn(lu_[i][j]) != 0)
                    y[i] -= lu_[i][j] * y[j];
            y[i] /= lu_[i][i];
        }
        return y;
    }

    /// M^T u = rhs.
    [[nodiscard]] std::vector<Rational> solve_transposed(const std::vector<Rational>& rhs) const
    {
        const std::size_t k = lu_.size();
        // P M = L U, so M^T = U^T L^T P.
        std::vector<Rational> z(k);
        for (std::size_t i = 0; i < k; ++i) {
            z[i] = rhs[i];
            for (std::size_t j = 0; j < i; ++j)
                if (sgn(lu_[j][i]) != 0)
                    z[i] -= lu_[j][i] * z[j];
            z[i] /= lu_[i][i];
        }
        for (std::size_t i = k; i-- > 0;)
            for (std::size_t j = i + 1; j < k; ++j)
                if (sgn(lu_[j][i]) != 0)
                    z[i] -= lu_[j][i] * z[j];
        std::vector<Rational> u(k);
        for (std::size_t i = 0; i < k; ++i)
            u[perm_[i]] = z[i];
        return u;
    }

    const DenseMatrix<std::int64_t>* A_;
    const std::vector<std::int64_t>* b_;
    std::vector<int> basis_;
    std::size_t m_, n_;
    std::vector<std::size_t> cols_;  // basic structural columns
    std::vector<std::size_t> rows_;  // rows whose slack is nonbasic
    DenseMatrix<Rational> lu_;
    std::vector<std::size_t> perm_;
};

/// Exact revised primal simplex (Bland's rule) started from a primal
/// feasible basis of an integer system. Only the structural core of the
/// basis is refactored each pivot. Throws std::invalid_argument when the
/// basis is not primal feasible.
inline LpSolution<Rational> simplex_from_basis(const std::vector<Rational>& c, const DenseMatrix<std::int64_t>& A,
                                               const std::vector<std::int64_t>& b, std::vector<int> basis,
                                               const SimplexOptions& opt = {})
{
    const std::size_t m = A.size();
    const std::size_t n = c.size();
    LpSolution<Rational> sol;
    std::vector<std::uint8_t> is_basic(n + m, 0);
    for (int col : basis)
        is_basic.at(static_cast<std::size_t>(col)) = 1;
    for (bool first = true;; first = false) {
        const BasisFactor f(A, b, basis);
        const auto x = f.primal();
        if (first)
            for (const auto& v : x)
                if (sgn(v) < 0)
                    throw std::invalid_argument("simplex_from_basis: basis is not primal feasible");
        const auto d = f.reduced_costs(c);
        std::optional<std::size_t> enter;
        for (std::size_t j = 0; j < n + m && !enter; ++j)
            if (!is_basic[j] && sgn(d[j]) > 0)
                enter = j;
        if (!enter) {
            sol.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
            for (std::size_t j = 0; j < n; ++j)
                sol.value += c[j] * sol.x[j];
            sol.basis = std::move(basis);
            return sol;
        }
        if (sol.pivots >= opt.max_pivots)
            throw LpError(LpStatus::iteration_limit, "simplex: pivot limit reached");
        const auto alpha = f.column(*enter);
        std::optional<std::size_t> leave;
        Rational best;
        for (std::size_t p = 0; p < m; ++p) {
            if (sgn(alpha[p]) <= 0)
                continue;
            Rational ratio = x[static_cast<std::size_t>(basis[p])] / alpha[p];
            if (!leave || ratio < best || (ratio == best && basis[p] < basis[*leave])) {
                leave = p;
                best = std::move(ratio);
            }
        }
        if (!leave)
            throw LpError(LpStatus::unbounded, "simplex: problem is unbounded");
        is_basic[static_cast<std::size_t>(basis[*leave])] = 0;
        is_basic[*enter] = 1;
        basis[*leave] = static_cast<int>(*enter);
        ++sol.pivots;
    }
}

/// Rows of B^-1 [A | I] and B^-1 b for an integer system and a basis,
/// computed exactly. Row r corresponds to basic column basis[r].
struct ExactTableau {
    std::size_t num_structural = 0;
    DenseMatrix<Rational> rows;
    std::vector<Rational> rhs;
    std::vector<int> basis;
};

inline ExactTableau exact_tableau(const DenseMatrix<std::int64_t>& A, const std::vector<std::int64_t>& b,
                                  const std::vector<int>& basis)
{
    const BasisFactor f(A, b, basis);
    ExactTableau t;
    t.num_structural = f.structural();
    t.basis = basis;
    for (std::size_t p = 0; p < f.rows(); ++p) {
        auto [row, rhs] = f.tableau_row(p);
        t.rows.push_back(std::move(row));
        t.rhs.push_back(std::move(rhs));
    }
    return t;
}

inline Rational floor_rational(const Rational& q)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(f);
}

inline Rational fractional_part(const Rational& q)
{
    return q - floor_rational(q);
}

/// Gomory cut from one tableau row x_B + sum_j a_j x_j = rhs with all
/// variables nonnegative integers: the fractional form
/// sum_j frac(a_j) x_j >= frac(rhs) and the equivalent rounded
/// (Chvatal-Gomory) form sum_j floor(a_j) x_j <= floor(rhs).
struct GomoryCut {
    std::vector<Rational> fractional_coeffs;
    Rational fractional_rhs;
    std::vector<Rational> rounded_coeffs;
    Rational rounded_rhs;
};

class NoFractionalRow : public std::invalid_argument {
public:
    NoFractionalRow() : std::invalid_argument("gomory_cut: row right-hand side is integral") {}
};

inline GomoryCut gomory_cut(std::span<const Rational> row, const Rational& rhs)
{
    if (sgn(fractional_part(rhs)) == 0)
        throw NoFractionalRow();
    GomoryCut cut;
    cut.fractional_coeffs.reserve(row.size());
    cut.rounded_coeffs.reserve(row.size());
    for (const auto& a : row) {
        cut.rounded_coeffs.push_back(floor_rational(a));
        cut.fractional_coeffs.push_back(a - cut.rounded_coeffs.back());
    }
    cut.rounded_rhs = floor_rational(rhs);
    cut.fractional_rhs = rhs - cut.rounded_rhs;
    return cut;
}

/// A rounded cut over [structural | slack] rewritten over the structural
/// variables alone by substituting slack_i = b_i - A_i x: a* x <= b*.
struct IntegerCut {
    std::vector<std::int64_t> coeffs;
    std::int64_t rhs = 0;
};

inline std::optional<IntegerCut> structural_cut(const GomoryCut& cut, const DenseMatrix<std::int64_t>& A,
                                                const std::vector<std::int64_t>& b)
{
    const std::size_t m = A.size();
    const std::size_t n = cut.rounded_coeffs.size() - m;
    std::vector<mpz_class> coeffs(n);
    for (std::size_t j = 0; j < n; ++j)
        coeffs[j] = cut.rounded_coeffs[j].get_num();
    mpz_class rhs = cut.rounded_rhs.get_num();
    for (std::size_t i = 0; i < m; ++i) {
        const mpz_class y = cut.rounded_coeffs[n + i].get_num();
        if (y == 0)
            continue;
        for (std::size_t j = 0; j < n; ++j)
            if (A[i][j] != 0)
                coeffs[j] -= y * static_cast<long>(A[i][j]);
        rhs -= y * static_cast<long>(b[i]);
    }
    IntegerCut out;
    out.coeffs.resize(n);
    constexpr long limit = std::numeric_limits<long>::max() / 4;
    for (std::size_t j = 0; j < n; ++j) {
        if (abs(coeffs[j]) > limit)
            return std::nullopt;
        out.coeffs[j] = coeffs[j].get_si();
    }
    if (abs(rhs) > limit)
        return std::nullopt;
    out.rhs = rhs.get_si();
    return out;
}

}  // namespace nestnull::lp
