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
 * @file harness.hpp
 * Monte Carlo experiments: random two-tier networks, per-method trial
 * rows, aggregation, CSV output.
 *
 * Random streams are keyed by (seed, trial, purpose), never by sweep
 * point, so one trial sees the same users at every sweep point and its
 * small-cell sets are nested (the first J cells of a larger sweep point
 * are the cells of a smaller one).
 */
#pragma once

#include "nestnull/coarray.hpp"
#include "nestnull/hetnet.hpp"
#include "nestnull/optimizer.hpp"
#include "nestnull/random.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestnull::harness {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Generation gave up; the message names the budget that was exceeded.
class GenerationFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PowerConfig {
    double mbs = 40.0;
    double sbs = 25.0;
    double sue = 15.0;
    std::vector<double> mue{10.0, 15.0, 20.0, 25.0, 30.0};  // inner ring first
};

struct ExperimentConfig {
    double macro_radius = 1000.0;
    double small_radius = 50.0;
    std::optional<double> sbs_min_separation;  // default 2 * small_radius
    std::vector<int> n_sbs{2, 4, 6, 8};
    std::vector<int> n_users{30};
    double bandwidth = 4e6;
    PowerConfig powers;
    double ratio_mbs = 100.0;
    double ratio_sbs = 10.0;
    int dof_mbs = 100;
    int dof_sbs = 11;
    int sbs_array_n1 = 2;
    int sbs_array_n2 = 2;
    int q_max = 3;
    std::optional<int> fixed_paths;  // q = L at every link when set
    int trials = 100;
    std::uint64_t seed = 1;
    std::vector<opt::Method> methods{opt::Method::no_nulling, opt::Method::heuristic, opt::Method::cutting_plane,
                                     opt::Method::upper_bound_p4};
    double gamma_out = 0.0;  // dB
    bool outage_array_gain = false;
    double epsilon_n = 1.0;
    double noise_dbm = -99.0;  // power reference; about kT over 4 MHz plus a 9 dB noise figure
    int max_order = 3;
    bool per_bs_probability = false;
    std::size_t term_limit = opt::default_term_limit;
    PathLossModels path_loss;
    double path_spread_deg = 10.0;
    bool record_solve_time = false;

    [[nodiscard]] double min_separation() const { return sbs_min_separation.value_or(2.0 * small_radius); }

    void validate() const
    {
        auto need = [](bool ok, const char* what) {
            if (!ok)
                throw ConfigError(what);
        };
        need(macro_radius > 0 && small_radius > 0, "radii must be positive");
        need(min_separation() >= 0, "sbs_min_separation must be nonnegative");
        need(!n_sbs.empty() && !n_users.empty(), "sweep lists must be nonempty");
        need(n_sbs.size() == 1 || n_users.size() == 1, "only one of n_sbs and n_users may be a sweep list");
        for (int v : n_sbs)
            need(v >= 0, "n_sbs must be nonnegative");
        for (int v : n_users)
            need(v >= 0, "n_users must be nonnegative");
        need(bandwidth > 0, "bandwidth must be positive");
        need(!powers.mue.empty(), "powers.mue needs at least one level");
        need(ratio_mbs > 0 && ratio_sbs > 0, "array gain ratios must be positive");
        need(dof_mbs >= 1 && dof_sbs >= 1, "DoF budgets must be at least 1");
        need(sbs_array_n1 >= 1 && sbs_array_n2 >= 1, "sbs_array levels need at least one sensor");
        need(static_cast<std::size_t>(dof_sbs) <= difference_coarray(sbs_array()).lags.size(),
             "dof_sbs exceeds the co-array size of the small-cell array");
        need(q_max >= 1, "q_max must be at least 1");
        need(!fixed_paths || *fixed_paths >= 1, "fixed_paths must be at least 1");
        need(trials >= 1, "trials must be at least 1");
        need(!methods.empty(), "methods must be nonempty");
        need(epsilon_n > 0, "epsilon_n must be positive");
        need(max_order >= 1, "max_order must be at least 1");
        need(path_spread_deg >= 0 && path_spread_deg < 90, "path_spread_deg must be in [0, 90)");
    }

    [[nodiscard]] ArrayGeometry sbs_array() const { return nested_positions(sbs_array_n1, sbs_array_n2); }

    [[nodiscard]] opt::SolverOptions solver_options() const
    {
        opt::SolverOptions o;
        o.surrogate.max_order = max_order;
        o.surrogate.term_limit = term_limit;
        o.surrogate.probability = per_bs_probability ? opt::ProbabilityMode::per_bs : opt::ProbabilityMode::shared;
        return o;
    }
};

// ---------------------------------------------------------------- sweep

enum class SweepParam { n_sbs, n_users };

inline std::string_view sweep_param_name(SweepParam p)
{
    return p == SweepParam::n_sbs ? "n_sbs" : "n_users";
}

struct SweepPoint {
    int n_sbs = 0;
    int n_users = 0;
    [[nodiscard]] int value(SweepParam p) const { return p == SweepParam::n_sbs ? n_sbs : n_users; }
};

inline SweepParam sweep_param(const ExperimentConfig& c)
{
    return c.n_users.size() > 1 ? SweepParam::n_users : SweepParam::n_sbs;
}

inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& c)
{
    std::vector<SweepPoint> out;
    if (c.n_users.size() > 1)
        for (int k : c.n_users)
            out.push_back({c.n_sbs.front(), k});
    else
        for (int j : c.n_sbs)
            out.push_back({j, c.n_users.front()});
    return out;
}

// ---------------------------------------------------------------- generation

namespace stream {
inline constexpr std::uint64_t sbs = 1, users = 2, multipath = 3, directions = 4;
}

inline constexpr int max_generation_attempts = 100;
inline constexpr int max_placement_draws = 10'000;

struct GeneratedScenario {
    Scenario scenario;
    PathDirections directions;  // [k][j], q_{k,j} entries each
    int attempts = 1;
};

namespace detail {

template <class Rng>
Position point_in_disk(Rng& rng, double radius)
{
    const double r = radius * std::sqrt(uniform01(rng));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    return {r * std::cos(phi), r * std::sin(phi)};
}

inline std::vector<Position> place_small_cells(const ExperimentConfig& c, int count, int trial, int attempt)
{
    auto rng = make_stream(c.seed, {stream::sbs, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(attempt)});
    std::vector<Position> cells;
    const double sep = c.min_separation();
    int draws = 0;
    while (static_cast<int>(cells.size()) < count) {
        if (++draws > max_placement_draws)
            throw GenerationFailed("could not place " + std::to_string(count) + " small cells " + std::to_string(sep) +
                                   " m apart within " + std::to_string(max_placement_draws) + " draws");
        const Position p = point_in_disk(rng, c.macro_radius);
        bool ok = true;
        for (const auto& q : cells)
            ok = ok && distance(p, q) >= sep;
        if (ok)
            cells.push_back(p);
    }
    return cells;
}

/// Broadside angle of a user seen from a linear array along the x axis.
inline double arrival_angle(Position bs, Position user)
{
    const double phi = std::atan2(user.y - bs.y, user.x - bs.x);
    return std::asin(std::clamp(std::cos(phi), -1.0, 1.0));
}

}  // namespace detail

/// MUE transmit power by equal-area ring of the macro disk.
inline double mue_power_dbm(const ExperimentConfig& c, double distance_to_mbs)
{
    const auto levels = static_cast<double>(c.powers.mue.size());
    const double u = std::clamp(distance_to_mbs / c.macro_radius, 0.0, 1.0);
    const auto ring = std::min<std::size_t>(static_cast<std::size_t>(levels * u * u), c.powers.mue.size() - 1);
    return c.powers.mue[ring];
}

/// One random network for `trial`. A draw whose serving load does not fit
/// a DoF budget is redrawn, up to max_generation_attempts times.
inline GeneratedScenario generate_scenario(const ExperimentConfig& c, int n_sbs, int n_users, int trial)
{
    c.validate();
    std::string last_failure;
    for (int attempt = 0; attempt < max_generation_attempts; ++attempt) {
        const auto cells = detail::place_small_cells(c, n_sbs, trial, attempt);
        auto urng = make_stream(c.seed, {stream::users, static_cast<std::uint64_t>(trial),
                                         static_cast<std::uint64_t>(attempt)});
        std::vector<BaseStation> bss;
        bss.push_back({Position{}, c.powers.mbs, c.ratio_mbs, c.dof_mbs, std::nullopt});
        for (const auto& p : cells)
            bss.push_back({p, c.powers.sbs, c.ratio_sbs, c.dof_sbs, c.sbs_array()});

        std::vector<User> users;
        for (int k = 0; k < n_users; ++k) {
            User u;
            u.position = detail::point_in_disk(urng, c.macro_radius);
            double best = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n_sbs; ++j) {
                const double d = distance(u.position, bss[static_cast<std::size_t>(j)].position);
                if (d <= c.small_radius && d < best) {
                    best = d;
                    u.serving_bs = j;
                }
            }
            u.tx_power_dbm = u.serving_bs == 0 ? mue_power_dbm(c, distance(u.position, Position{})) : c.powers.sue;
            users.push_back(u);
        }

        const int nb = n_sbs + 1;
        Eigen::MatrixXd gain_db(n_users, nb);
        Eigen::MatrixXi q(n_users, nb);
        PathDirections dirs(static_cast<std::size_t>(n_users), std::vector<std::vector<double>>(static_cast<std::size_t>(nb)));
        const double spread = c.path_spread_deg * std::numbers::pi / 180.0;
        const double edge = std::numbers::pi / 2 - 1e-3;
        for (int k = 0; k < n_users; ++k)
            for (int j = 0; j < nb; ++j) {
                const auto& bs = bss[static_cast<std::size_t>(j)];
                const auto& u = users[static_cast<std::size_t>(k)];
                const LinkClass cls = j == 0 ? LinkClass::macro
                                      : u.serving_bs == j ? LinkClass::small_indoor
                                                          : LinkClass::small_outdoor;
                gain_db(k, j) = -path_loss_db(bs.position, u.position, cls, c.path_loss);
                const auto key = [&](std::uint64_t purpose, std::uint64_t extra) {
                    return stream_key(c.seed, {purpose, static_cast<std::uint64_t>(trial),
                                               static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(k),
                                               static_cast<std::uint64_t>(j), extra});
                };
                q(k, j) = c.fixed_paths ? *c.fixed_paths
                                        : 1 + static_cast<int>(uniform_below(key(stream::multipath, 0),
                                                                             static_cast<std::uint64_t>(c.q_max)));
                auto& paths = dirs[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                const double los = detail::arrival_angle(bs.position, u.position);
                for (int p = 0; p < q(k, j); ++p) {
                    const double off =
                        p == 0 ? 0.0 : spread * (2.0 * unit_uniform(key(stream::directions, static_cast<std::uint64_t>(p))) - 1.0);
                    paths.push_back(std::clamp(los + off, -edge, edge));
                }
            }
        try {
            return {Scenario(std::move(bss), std::move(users), std::move(gain_db), std::move(q), c.epsilon_n, c.noise_dbm),
                    std::move(dirs), attempt + 1};
        } catch (const InfeasibleScenario& e) {
            last_failure = e.what();
        }
    }
    throw GenerationFailed("no feasible network after " + std::to_string(max_generation_attempts) +
                           " attempts; last: " + last_failure);
}

// ---------------------------------------------------------------- trials

struct TrialReport {
    int trial_id = 0;
    int n_sbs = 0;
    int n_users = 0;
    opt::Method method = opt::Method::no_nulling;
    double sum_rate_bps_hz = std::numeric_limits<double>::quiet_NaN();
    double sum_rate_bps = std::numeric_limits<double>::quiet_NaN();
    double mu_outage_prob = std::numeric_limits<double>::quiet_NaN();  // NaN without macro users
    std::size_t cuts_added = 0;
    double solve_time_ms = 0.0;
    std::uint64_t seed = 0;
    double linearized = std::numeric_limits<double>::quiet_NaN();
    double surrogate = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
    NullingAssignment assignment;

    [[nodiscard]] bool ok() const { return status == "ok"; }
};

/// Every requested method on one generated network.
inline std::vector<TrialReport> run_trial(const ExperimentConfig& c, const SweepPoint& pt, int trial)
{
    const auto gen = generate_scenario(c, pt.n_sbs, pt.n_users, trial);
    const auto& s = gen.scenario;
    const auto sopt = c.solver_options();

    std::optional<opt::Surrogate> sur;
    std::string sur_status = "ok";
    bool wants = false;
    for (auto m : c.methods)
        wants = wants || opt::needs_surrogate(m);
    if (wants) {
        try {
            sur = opt::build_surrogate(s, sopt.surrogate);
        } catch (const opt::ExpansionTooLarge&) {
            sur_status = "too_large";
        }
    }

    std::vector<TrialReport> rows;
    for (auto m : c.methods) {
        TrialReport r;
        r.trial_id = trial;
        r.n_sbs = pt.n_sbs;
        r.n_users = pt.n_users;
        r.method = m;
        r.seed = c.seed;
        try {
            if (opt::needs_surrogate(m) && !sur)
                throw opt::ExpansionTooLarge(0);
            const auto rep = opt::solve(s, m, sopt, sur ? &*sur : nullptr);
            r.sum_rate_bps_hz = rep.objective_exact_rate;
            r.sum_rate_bps = rep.objective_exact_rate * c.bandwidth;
            if (const auto o = outage_probability_mu(s, rep.assignment, {c.gamma_out, c.outage_array_gain}))
                r.mu_outage_prob = *o;
            r.cuts_added = rep.cuts_added;
            r.solve_time_ms = rep.solve_time_ms;
            r.linearized = rep.objective_linearized;
            r.surrogate = rep.objective_surrogate;
            r.assignment = rep.assignment;
        } catch (const opt::ExpansionTooLarge&) {
            r.status = "too_large";
        } catch (const opt::ProblemTooLarge&) {
            r.status = "too_large";
        } catch (const opt::NotSpecialCase&) {
            r.status = "not_special_case";
        } catch (const std::exception&) {
            r.status = "solver_failed";
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Rows in sweep order, then trial order, then method order.
inline std::vector<TrialReport> run_experiment(const ExperimentConfig& c,
                                               const std::function<void(const SweepPoint&, int)>& progress = {})
{
    c.validate();
    std::vector<TrialReport> rows;
    for (const auto& pt : sweep_points(c))
        for (int t = 0; t < c.trials; ++t) {
            if (progress)
                progress(pt, t);
            auto part = run_trial(c, pt, t);
            rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
    return rows;
}

/// A method that failed on every one of its trials, if any.
inline std::optional<opt::Method> method_failing_everywhere(const ExperimentConfig& c,
                                                            const std::vector<TrialReport>& rows)
{
    for (auto m : c.methods) {
        bool any = false, all_failed = true;
        for (const auto& r : rows)
            if (r.method == m) {
                any = true;
                all_failed = all_failed && !r.ok();
            }
        if (any && all_failed)
            return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- aggregation

/// Count, mean and sum of squared deviations; mergeable.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        mean += d * nb / (na + nb);
        m2 += o.m2 + d * d * na * nb / (na + nb);
        n += o.n;
    }

    /// Sample standard deviation over sqrt(n); 0 for a single value.
    [[nodiscard]] double stderr_of_mean() const
    {
        if (n < 2)
            return 0.0;
        const double var = m2 / static_cast<double>(n - 1);
        return std::sqrt(var / static_cast<double>(n));
    }
};

struct SummaryRow {
    int sweep_value = 0;
    opt::Method method = opt::Method::no_nulling;
    std::string metric;
    Moments moments;
};

inline const std::vector<std::string>& summary_metrics()
{
    static const std::vector<std::string> m{"sum_rate_bps_hz", "sum_rate_bps", "mu_outage_prob"};
    return m;
}

/// Per (sweep value, method, metric) moments over successful rows; NaN
/// values (no macro users) are skipped. Order follows first appearance.
inline std::vector<SummaryRow> aggregate(const std::vector<TrialReport>& rows, SweepParam param)
{
    std::vector<SummaryRow> out;
    auto slot = [&](int v, opt::Method m, const std::string& metric) -> Moments& {
        for (auto& r : out)
            if (r.sweep_value == v && r.method == m && r.metric == metric)
                return r.moments;
        out.push_back({v, m, metric, {}});
        return out.back().moments;
    };
    for (const auto& r : rows) {
        const int v = param == SweepParam::n_sbs ? r.n_sbs : r.n_users;
        const double vals[] = {r.sum_rate_bps_hz, r.sum_rate_bps, r.mu_outage_prob};
        for (std::size_t i = 0; i < summary_metrics().size(); ++i) {
            auto& mo = slot(v, r.method, summary_metrics()[i]);
            if (r.ok() && !std::isnan(vals[i]))
                mo.add(vals[i]);
        }
    }
    return out;
}

/// Mean of one metric for (sweep value, method); NaN when absent.
inline double summary_mean(const std::vector<SummaryRow>& rows, int value, opt::Method m, std::string_view metric)
{
    for (const auto& r : rows)
        if (r.sweep_value == value && r.method == m && r.metric == metric && r.moments.n > 0)
            return r.moments.mean;
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------- CSV

inline std::string format_float(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline constexpr const char* trials_header =
    "trial_id,n_sbs,n_users,method,sum_rate_bps_hz,sum_rate_bps,mu_outage_prob,cuts_added,solve_time_ms,seed,"
    "linearized,surrogate,status";

inline void write_trials_csv(std::ostream& os, const std::vector<TrialReport>& rows, bool record_solve_time)
{
    os << trials_header << '\n';
    for (const auto& r : rows) {
        os << r.trial_id << ',' << r.n_sbs << ',' << r.n_users << ',' << opt::method_name(r.method) << ','
           << format_float(r.sum_rate_bps_hz) << ',' << format_float(r.sum_rate_bps) << ','
           << format_float(r.mu_outage_prob) << ',' << r.cuts_added << ','
           << (record_solve_time ? format_float(r.solve_time_ms) : std::string("NA")) << ',' << r.seed << ','
           << format_float(r.linearized) << ',' << format_float(r.surrogate) << ',' << r.status << '\n';
    }
}

inline constexpr const char* summary_header = "sweep_value,method,metric,mean,stderr,n";

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << summary_header << '\n';
    for (const auto& r : rows) {
        const bool empty = r.moments.n == 0;
        os << r.sweep_value << ',' << opt::method_name(r.method) << ',' << r.metric << ','
           << format_float(empty ? std::numeric_limits<double>::quiet_NaN() : r.moments.mean) << ','
           << format_float(empty ? std::numeric_limits<double>::quiet_NaN() : r.moments.stderr_of_mean()) << ','
           << r.moments.n << '\n';
    }
}

}  // namespace nestnull::harness
