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
 * @file hetnet.hpp
 * Two-tier network model: one macro BS (index 0) and J small-cell BSs
 * (1..J), users with a fixed association, large-scale gains, multipath
 * counts and the per-user uplink + downlink rate expressions.
 *
 * All powers are handled in linear units relative to a noise reference
 * level (noise_dbm), so a received power of 1 equals the noise power.
 * Rates are in nats/s/Hz; use nats_to_bits() at the reporting layer.
 */
#pragma once

#include "nestnull/beamforming.hpp"
#include "nestnull/coarray.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestnull {

struct Position {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double dbm_to_linear(double dbm, double reference_dbm = 0.0)
{
    return std::pow(10.0, (dbm - reference_dbm) / 10.0);
}

constexpr double nats_to_bits(double nats)
{
    return nats / std::numbers::ln2;
}

// ---------------------------------------------------------------- path loss

enum class LinkClass { macro, small_outdoor, small_indoor };

/// PL(d) = intercept_db + slope_db * log10(d / 1 m).
struct LogDistanceModel {
    double intercept_db = 0.0;
    double slope_db = 0.0;
};

struct PathLossModels {
    LogDistanceModel macro{38.0, 35.0};
    LogDistanceModel small_outdoor{30.5, 36.7};
    LogDistanceModel small_indoor{38.46, 20.0};

    [[nodiscard]] const LogDistanceModel& operator[](LinkClass c) const
    {
        switch (c) {
        case LinkClass::macro: return macro;
        case LinkClass::small_outdoor: return small_outdoor;
        case LinkClass::small_indoor: return small_indoor;
        }
        return macro;
    }
};

/// Distances below 1 m are clamped to the 1 m reference distance.
inline double path_loss_db(Position tx, Position rx, LinkClass link, const PathLossModels& models = {})
{
    const double d = std::max(distance(tx, rx), 1.0);
    const auto& m = models[link];
    return m.intercept_db + m.slope_db * std::log10(d);
}

inline double path_gain(Position tx, Position rx, LinkClass link, const PathLossModels& models = {})
{
    return std::pow(10.0, -path_loss_db(tx, rx, link, models) / 10.0);
}

// ---------------------------------------------------------------- scenario

struct BaseStation {
    Position position;
    double tx_power_dbm = 0.0;
    double array_gain_ratio = 1.0;  // (M_j - S_j + 1) / S_j
    int dof_budget = 1;             // D_j
    std::optional<ArrayGeometry> array;
};

struct User {
    Position position;
    double tx_power_dbm = 0.0;
    int serving_bs = 0;
};

class InfeasibleScenario : public std::invalid_argument {
public:
    InfeasibleScenario(int bs, int load, int budget)
        : std::invalid_argument("infeasible scenario: base load " + std::to_string(load) + " + 1 exceeds DoF budget " +
                                std::to_string(budget) + " at BS " + std::to_string(bs)),
          bs_(bs)
    {
    }
    [[nodiscard]] int bs() const { return bs_; }

private:
    int bs_;
};

class Scenario {
public:
    Scenario(std::vector<BaseStation> bss, std::vector<User> users, Eigen::MatrixXd gain_db, Eigen::MatrixXi multipath,
             double noise_floor = 1.0, double noise_dbm = 0.0)
        : bss_(std::move(bss)), users_(std::move(users)), gain_db_(std::move(gain_db)), q_(std::move(multipath)),
          noise_floor_(noise_floor), noise_dbm_(noise_dbm)
    {
        validate();
        const auto k = static_cast<Eigen::Index>(users_.size());
        const auto nb = static_cast<Eigen::Index>(bss_.size());
        gain_.resize(k, nb);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < nb; ++j)
                gain_(i, j) = std::pow(10.0, gain_db_(i, j) / 10.0);
        for (const auto& u : users_)
            user_power_.push_back(dbm_to_linear(u.tx_power_dbm, noise_dbm_));
        for (const auto& b : bss_)
            bs_power_.push_back(dbm_to_linear(b.tx_power_dbm, noise_dbm_));
    }

    [[nodiscard]] int num_users() const { return static_cast<int>(users_.size()); }
    [[nodiscard]] int num_bs() const { return static_cast<int>(bss_.size()); }
    [[nodiscard]] int num_small_cells() const { return num_bs() - 1; }

    [[nodiscard]] const std::vector<BaseStation>& base_stations() const { return bss_; }
    [[nodiscard]] const std::vector<User>& users() const { return users_; }
    [[nodiscard]] const BaseStation& bs(int j) const { return bss_.at(static_cast<std::size_t>(j)); }
    [[nodiscard]] const User& user(int k) const { return users_.at(static_cast<std::size_t>(k)); }

    [[nodiscard]] double gain(int k, int j) const { return gain_(k, j); }
    [[nodiscard]] double gain_db(int k, int j) const { return gain_db_(k, j); }
    [[nodiscard]] const Eigen::MatrixXd& gain_db_matrix() const { return gain_db_; }
    [[nodiscard]] const Eigen::MatrixXi& multipath_matrix() const { return q_; }
    [[nodiscard]] int q(int k, int j) const { return q_(k, j); }
    [[nodiscard]] bool x(int k, int j) const { return users_[static_cast<std::size_t>(k)].serving_bs == j; }
    [[nodiscard]] int serving(int k) const { return users_[static_cast<std::size_t>(k)].serving_bs; }

    /// Transmit powers, linear, relative to the noise reference.
    [[nodiscard]] double user_power(int k) const { return user_power_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] double bs_power(int j) const { return bs_power_[static_cast<std::size_t>(j)]; }
    [[nodiscard]] double ratio(int j) const { return bss_[static_cast<std::size_t>(j)].array_gain_ratio; }
    [[nodiscard]] int dof(int j) const { return bss_[static_cast<std::size_t>(j)].dof_budget; }
    [[nodiscard]] double noise_floor() const { return noise_floor_; }
    [[nodiscard]] double noise_dbm() const { return noise_dbm_; }

    /// sum_k x_{k,j} q_{k,j}
    [[nodiscard]] int base_load(int j) const
    {
        int load = 0;
        for (int k = 0; k < num_users(); ++k)
            if (x(k, j))
                load += q(k, j);
        return load;
    }

    /// E_j = D_j - base_load(j) - 1: DoF left for nulling.
    [[nodiscard]] int nulling_capacity(int j) const { return dof(j) - base_load(j) - 1; }

    [[nodiscard]] std::vector<int> served_users(int j) const
    {
        std::vector<int> out;
        for (int k = 0; k < num_users(); ++k)
            if (x(k, j))
                out.push_back(k);
        return out;
    }

private:
    void validate() const
    {
        if (bss_.empty())
            throw std::invalid_argument("Scenario: the macro BS (index 0) is required");
        const auto k = static_cast<Eigen::Index>(users_.size());
        const auto nb = static_cast<Eigen::Index>(bss_.size());
        if (gain_db_.rows() != k || gain_db_.cols() != nb)
            throw std::invalid_argument("Scenario: gain matrix must be K x (J+1)");
        if (q_.rows() != k || q_.cols() != nb)
            throw std::invalid_argument("Scenario: multipath matrix must be K x (J+1)");
        if (!(noise_floor_ > 0.0) || !std::isfinite(noise_floor_))
            throw std::invalid_argument("Scenario: noise floor must be positive");
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < nb; ++j) {
                if (!std::isfinite(gain_db_(i, j)))
                    throw std::invalid_argument("Scenario: gains must be positive and finite");
                if (q_(i, j) < 1)
                    throw std::invalid_argument("Scenario: multipath counts must be >= 1");
            }
        for (const auto& u : users_)
            if (u.serving_bs < 0 || u.serving_bs >= static_cast<int>(nb))
                throw std::invalid_argument("Scenario: user associated with a nonexistent BS");
        for (std::size_t j = 0; j < bss_.size(); ++j) {
            const auto& b = bss_[j];
            if (!(b.array_gain_ratio > 0.0))
                throw std::invalid_argument("Scenario: array gain ratio must be positive");
            if (b.dof_budget < 1)
                throw std::invalid_argument("Scenario: DoF budget must be >= 1");
            if (j > 0 && b.array) {
                const auto lags = difference_coarray(*b.array).lags.size();
                if (static_cast<std::size_t>(b.dof_budget) > lags)
                    throw std::invalid_argument("Scenario: SBS DoF budget exceeds its co-array size");
            }
        }
        for (int j = 0; j < static_cast<int>(nb); ++j) {
            int load = 0;
            for (std::size_t i = 0; i < users_.size(); ++i)
                if (users_[i].serving_bs == j)
                    load += q_(static_cast<Eigen::Index>(i), j);
            if (load + 1 > bss_[static_cast<std::size_t>(j)].dof_budget)
                throw InfeasibleScenario(j, load, bss_[static_cast<std::size_t>(j)].dof_budget);
        }
    }

    std::vector<BaseStation> bss_;
    std::vector<User> users_;
    Eigen::MatrixXd gain_db_;
    Eigen::MatrixXd gain_;
    Eigen::MatrixXi q_;
    std::vector<double> user_power_;
    std::vector<double> bs_power_;
    double noise_floor_;
    double noise_dbm_;
};

// ---------------------------------------------------------------- nulling

/// Binary n_{k,j}; stacked index is j*K + k (users fastest).
class NullingAssignment {
public:
    NullingAssignment() = default;
    NullingAssignment(int num_users, int num_bs)
        : k_(num_users), nb_(num_bs), bits_(static_cast<std::size_t>(num_users * num_bs), 0)
    {
    }
    static NullingAssignment zeros(const Scenario& s) { return {s.num_users(), s.num_bs()}; }

    static NullingAssignment from_stacked(int num_users, int num_bs, const std::vector<std::uint8_t>& stacked)
    {
        if (stacked.size() != static_cast<std::size_t>(num_users * num_bs))
            throw std::invalid_argument("NullingAssignment: stacked vector has the wrong length");
        NullingAssignment n(num_users, num_bs);
        n.bits_ = stacked;
        return n;
    }

    [[nodiscard]] int num_users() const { return k_; }
    [[nodiscard]] int num_bs() const { return nb_; }
    [[nodiscard]] std::size_t index(int k, int j) const { return static_cast<std::size_t>(j * k_ + k); }
    [[nodiscard]] std::uint8_t operator()(int k, int j) const { return bits_[index(k, j)]; }
    void set(int k, int j, std::uint8_t v) { bits_[index(k, j)] = v; }
    [[nodiscard]] const std::vector<std::uint8_t>& stacked() const { return bits_; }
    [[nodiscard]] int count() const
    {
        int c = 0;
        for (auto b : bits_)
            c += b;
        return c;
    }

    friend bool operator==(const NullingAssignment&, const NullingAssignment&) = default;

private:
    int k_ = 0;
    int nb_ = 0;
    std::vector<std::uint8_t> bits_;
};

enum class ConstraintKind { shape, binary, serving_user, dof_budget };

struct ConstraintViolation {
    ConstraintKind kind = ConstraintKind::shape;
    int bs = -1;
    int user = -1;

    [[nodiscard]] std::string describe() const
    {
        std::ostringstream os;
        switch (kind) {
        case ConstraintKind::shape: os << "assignment dimensions do not match the scenario"; break;
        case ConstraintKind::binary: os << "n[" << user << "," << bs << "] is not binary"; break;
        case ConstraintKind::serving_user:
            os << "n[" << user << "," << bs << "] = 1 but BS " << bs << " serves user " << user;
            break;
        case ConstraintKind::dof_budget: os << "DoF budget exceeded at BS " << bs; break;
        }
        return os.str();
    }
};

class InfeasibleAssignment : public std::invalid_argument {
public:
    explicit InfeasibleAssignment(ConstraintViolation v)
        : std::invalid_argument("infeasible nulling assignment: " + v.describe()), violation_(v)
    {
    }
    [[nodiscard]] const ConstraintViolation& violation() const { return violation_; }

private:
    ConstraintViolation violation_;
};

/// DoF rows consumed at BS j: serving + nulling multipath plus one for noise.
inline int dof_rows_used(const Scenario& s, const NullingAssignment& n, int j)
{
    int rows = s.base_load(j) + 1;
    for (int k = 0; k < s.num_users(); ++k)
        if (n(k, j))
            rows += s.q(k, j);
    return rows;
}

inline std::optional<ConstraintViolation> find_violation(const Scenario& s, const NullingAssignment& n)
{
    if (n.num_users() != s.num_users() || n.num_bs() != s.num_bs())
        return ConstraintViolation{};
    for (int j = 0; j < s.num_bs(); ++j)
        for (int k = 0; k < s.num_users(); ++k) {
            if (n(k, j) > 1)
                return ConstraintViolation{ConstraintKind::binary, j, k};
            if (n(k, j) && s.x(k, j))
                return ConstraintViolation{ConstraintKind::serving_user, j, k};
        }
    for (int j = 0; j < s.num_bs(); ++j)
        if (!fits_dof_budget(static_cast<std::size_t>(dof_rows_used(s, n, j)), static_cast<std::size_t>(s.dof(j))))
            return ConstraintViolation{ConstraintKind::dof_budget, j, -1};
    return std::nullopt;
}

inline void require_feasible(const Scenario& s, const NullingAssignment& n)
{
    if (auto v = find_violation(s, n))
        throw InfeasibleAssignment(*v);
}

// ---------------------------------------------------------------- rates

/// One interference contribution: power * (1 - n[user, bs]).
struct Interferer {
    int user = 0;
    int bs = 0;
    double power = 0.0;
};

/// Desired received power (array gain included) and the interferers
/// that share its denominator.
struct LinkBudget {
    double desired = 0.0;
    std::vector<Interferer> interferers;
};

inline LinkBudget uplink_budget(const Scenario& s, int k)
{
    const int j = s.serving(k);
    LinkBudget lb;
    lb.desired = s.ratio(j) * s.user_power(k) * s.gain(k, j);
    if (j == 0) {
        // Intra-macro interference averages out; only small-cell users count.
        for (int kp = 0; kp < s.num_users(); ++kp)
            if (s.serving(kp) != 0)
                lb.interferers.push_back({kp, 0, s.user_power(kp) * s.gain(kp, 0)});
    } else {
        for (int kp = 0; kp < s.num_users(); ++kp)
            if (kp != k)
                lb.interferers.push_back({kp, j, s.user_power(kp) * s.gain(kp, j)});
    }
    return lb;
}

inline LinkBudget downlink_budget(const Scenario& s, int k)
{
    const int j = s.serving(k);
    LinkBudget lb;
    lb.desired = s.ratio(j) * s.bs_power(j) * s.gain(k, j);
    for (int jp = 1; jp < s.num_bs(); ++jp)
        if (jp != j)
            lb.interferers.push_back({k, jp, s.bs_power(jp) * s.gain(k, jp)});
    return lb;
}

/// noise_floor + sum of un-nulled interference.
inline double interference_power(const Scenario& s, const NullingAssignment& n, const std::vector<Interferer>& terms)
{
    double sum = s.noise_floor();
    for (const auto& t : terms)
        if (!n(t.user, t.bs))
            sum += t.power;
    return sum;
}

inline double link_rate(const Scenario& s, const NullingAssignment& n, const LinkBudget& lb)
{
    return std::log1p(lb.desired / interference_power(s, n, lb.interferers));
}

/// Uplink + downlink rate of a small-cell user, nats/s/Hz.
inline double rate_small_cell_user(const Scenario& s, const NullingAssignment& n, int k, int j)
{
    if (j < 1 || !s.x(k, j))
        throw std::invalid_argument("rate_small_cell_user: user is not served by that small cell");
    return link_rate(s, n, uplink_budget(s, k)) + link_rate(s, n, downlink_budget(s, k));
}

/// Uplink + downlink rate of a macro user, nats/s/Hz.
inline double rate_macro_user(const Scenario& s, const NullingAssignment& n, int k)
{
    if (!s.x(k, 0))
        throw std::invalid_argument("rate_macro_user: user is not served by the macro BS");
    return link_rate(s, n, uplink_budget(s, k)) + link_rate(s, n, downlink_budget(s, k));
}

inline double user_rate(const Scenario& s, const NullingAssignment& n, int k)
{
    const int j = s.serving(k);
    return j == 0 ? rate_macro_user(s, n, k) : rate_small_cell_user(s, n, k, j);
}

/// Network sum rate, nats/s/Hz. Throws InfeasibleAssignment.
inline double sum_rate(const Scenario& s, const NullingAssignment& n)
{
    require_feasible(s, n);
    double total = 0.0;
    for (int k = 0; k < s.num_users(); ++k)
        total += user_rate(s, n, k);
    return total;
}

inline double sum_rate_bits(const Scenario& s, const NullingAssignment& n)
{
    return nats_to_bits(sum_rate(s, n));
}

struct OutageOptions {
    double threshold_db = 0.0;
    bool include_array_gain = false;
};

/// Downlink SINR of a macro user, linear.
inline double mu_downlink_sinr(const Scenario& s, const NullingAssignment& n, int k, bool include_array_gain = false)
{
    auto lb = downlink_budget(s, k);
    double sig = s.bs_power(0) * s.gain(k, 0);
    if (include_array_gain)
        sig *= s.ratio(0);
    return sig / interference_power(s, n, lb.interferers);
}

/// Fraction of macro users whose downlink SINR is below the threshold;
/// empty when there are no macro users.
inline std::optional<double> outage_probability_mu(const Scenario& s, const NullingAssignment& n,
                                                   const OutageOptions& opt = {})
{
    const auto mus = s.served_users(0);
    if (mus.empty())
        return std::nullopt;
    const double thr = std::pow(10.0, opt.threshold_db / 10.0);
    int below = 0;
    for (int k : mus)
        if (mu_downlink_sinr(s, n, k, opt.include_array_gain) < thr)
            ++below;
    return static_cast<double>(below) / static_cast<double>(mus.size());
}

// ---------------------------------------------------------------- beam specs

/// Per-link multipath directions: directions[k][j] has q_{k,j} entries (radians).
using PathDirections = std::vector<std::vector<std::vector<double>>>;

/// Pattern constraints BS j must realise under assignment n: unit gain on
/// every path of its own users, nulls on every path of nulled users, noise
/// nulled. Its row count equals dof_rows_used(s, n, j).
inline NullingSpec nulling_spec_for_bs(const Scenario& s, const NullingAssignment& n, int j,
                                       const PathDirections& directions)
{
    NullingSpec spec;
    spec.null_noise = true;
    for (int k = 0; k < s.num_users(); ++k) {
        const auto& paths = directions.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(j));
        if (static_cast<int>(paths.size()) != s.q(k, j))
            throw std::invalid_argument("nulling_spec_for_bs: direction count differs from q");
        if (s.x(k, j))
            spec.desired.insert(spec.desired.end(), paths.begin(), paths.end());
        else if (n(k, j))
            spec.nulls.insert(spec.nulls.end(), paths.begin(), paths.end());
    }
    return spec;
}

}  // namespace nestnull
