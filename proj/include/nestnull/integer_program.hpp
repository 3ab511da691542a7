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
 * @file integer_program.hpp
 * The 0-1 program  max c.n  s.t.  A n <= b,  n binary  over the stacked
 * nulling variables, its construction from a scenario, and a plain-text
 * exchange format.
 *
 * Row layout: J+1 budget rows (row j holds q_{k,j} at the columns of BS j)
 * followed by one identity row per variable. The matching right-hand side
 * is E_j = D_j - sum_k x_{k,j} q_{k,j} - 1, then 1 - x_{k,j}.
 *
 * Text format (whitespace separated, doubles with 17 significant digits):
 *
 *     rows cols
 *     c_0 ... c_{cols-1}
 *     A_00 ... A_0,cols-1
 *     ...
 *     b_0 ... b_{rows-1}
 */
#pragma once

#include "nestnull/hetnet.hpp"

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestnull::opt {

struct IntegerProgram {
    std::vector<double> c;
    std::vector<std::vector<std::int64_t>> A;
    std::vector<double> b;

    [[nodiscard]] std::size_t num_variables() const { return c.size(); }
    [[nodiscard]] std::size_t num_rows() const { return A.size(); }

    void validate() const
    {
        if (b.size() != A.size())
            throw std::invalid_argument("IntegerProgram: b needs one entry per row");
        for (const auto& row : A)
            if (row.size() != c.size())
                throw std::invalid_argument("IntegerProgram: every row needs one entry per variable");
    }

    template <class Int>
    [[nodiscard]] bool feasible(const std::vector<Int>& n) const
    {
        if (n.size() != c.size())
            return false;
        for (auto v : n)
            if (v != 0 && v != 1)
                return false;
        for (std::size_t r = 0; r < A.size(); ++r) {
            // Integer left side against a real bound.
            std::int64_t lhs = 0;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (n[i])
                    lhs += A[r][i];
            if (static_cast<double>(lhs) > b[r])
                return false;
        }
        return true;
    }

    template <class Int>
    [[nodiscard]] double value(const std::vector<Int>& n) const
    {
        double v = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (n[i])
                v += c[i];
        return v;
    }

    friend bool operator==(const IntegerProgram&, const IntegerProgram&) = default;
};

/// Budget and box rows for a scenario; multipath counts in the Q block.
inline IntegerProgram constraint_rows(const Scenario& s)
{
    const int K = s.num_users();
    const int nb = s.num_bs();
    const auto nv = static_cast<std::size_t>(K * nb);
    IntegerProgram ip;
    ip.c.assign(nv, 0.0);
    ip.A.assign(static_cast<std::size_t>(nb) + nv, std::vector<std::int64_t>(nv, 0));
    ip.b.assign(ip.A.size(), 0.0);
    for (int j = 0; j < nb; ++j) {
        for (int k = 0; k < K; ++k)
            ip.A[static_cast<std::size_t>(j)][static_cast<std::size_t>(j * K + k)] = s.q(k, j);
        ip.b[static_cast<std::size_t>(j)] = s.nulling_capacity(j);
    }
    for (int j = 0; j < nb; ++j)
        for (int k = 0; k < K; ++k) {
            const auto v = static_cast<std::size_t>(j * K + k);
            ip.A[static_cast<std::size_t>(nb) + v][v] = 1;
            ip.b[static_cast<std::size_t>(nb) + v] = s.x(k, j) ? 0.0 : 1.0;
        }
    return ip;
}

class NotSpecialCase : public std::invalid_argument {
public:
    explicit NotSpecialCase(int bs)
        : std::invalid_argument("multipath counts differ at BS " + std::to_string(bs) +
                                "; use the cutting-plane method instead")
    {
    }
};

/// Common multipath count per BS, or NotSpecialCase.
inline std::vector<int> fixed_path_counts(const Scenario& s)
{
    std::vector<int> L(static_cast<std::size_t>(s.num_bs()), 1);
    for (int j = 0; j < s.num_bs(); ++j) {
        if (s.num_users() == 0)
            continue;
        L[static_cast<std::size_t>(j)] = s.q(0, j);
        for (int k = 1; k < s.num_users(); ++k)
            if (s.q(k, j) != s.q(0, j))
                throw NotSpecialCase(j);
    }
    return L;
}

/// Constraint rows with every budget row divided by its path count L_j:
/// all-ones Q block and right-hand side floor(E_j / L_j).
inline IntegerProgram unimodular_rows(const Scenario& s)
{
    const auto L = fixed_path_counts(s);
    IntegerProgram ip = constraint_rows(s);
    for (int j = 0; j < s.num_bs(); ++j) {
        auto& row = ip.A[static_cast<std::size_t>(j)];
        for (auto& a : row)
            if (a != 0)
                a = 1;
        const int e = s.nulling_capacity(j);
        const int l = L[static_cast<std::size_t>(j)];
        ip.b[static_cast<std::size_t>(j)] = static_cast<double>(e >= 0 ? e / l : -((-e + l - 1) / l));
    }
    return ip;
}

inline void write_integer_program(std::ostream& os, const IntegerProgram& ip)
{
    ip.validate();
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    os << ip.num_rows() << ' ' << ip.num_variables() << '\n';
    for (std::size_t i = 0; i < ip.c.size(); ++i) {
        if (i)
            os << ' ';
        put(ip.c[i]);
    }
    os << '\n';
    for (const auto& row : ip.A) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? " " : "") << row[i];
        os << '\n';
    }
    for (std::size_t r = 0; r < ip.b.size(); ++r) {
        if (r)
            os << ' ';
        put(ip.b[r]);
    }
    os << '\n';
}

inline IntegerProgram read_integer_program(std::istream& is)
{
    std::size_t rows = 0, cols = 0;
    if (!(is >> rows >> cols))
        throw std::runtime_error("integer program: missing dimensions");
    IntegerProgram ip;
    ip.c.resize(cols);
    ip.A.assign(rows, std::vector<std::int64_t>(cols));
    ip.b.resize(rows);
    // strtod keeps the 17-digit round trip exact.
    auto get_double = [&](double& v) {
        std::string tok;
        if (!(is >> tok))
            throw std::runtime_error("integer program: truncated input");
        std::size_t used = 0;
        v = std::stod(tok, &used);
        if (used != tok.size())
            throw std::runtime_error("integer program: bad number '" + tok + "'");
    };
    for (auto& v : ip.c)
        get_double(v);
    for (auto& row : ip.A)
        for (auto& a : row)
            if (!(is >> a))
                throw std::runtime_error("integer program: truncated constraint matrix");
    for (auto& v : ip.b)
        get_double(v);
    return ip;
}

}  // namespace nestnull::opt
