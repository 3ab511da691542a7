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

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace nestnull;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Explicit network: gains in dB (users x BSs), powers in dBm against a 0 dBm
// noise reference, one path per link and loose budgets.
Scenario explicit_network(const std::vector<std::vector<double>>& gain_db, const std::vector<int>& serving,
                          const std::vector<double>& bs_dbm, const std::vector<double>& user_dbm, int dof = 11)
{
    const auto K = static_cast<Eigen::Index>(gain_db.size());
    const auto B = static_cast<Eigen::Index>(bs_dbm.size());
    Eigen::MatrixXd g(K, B);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < B; ++j)
            g(k, j) = gain_db[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    std::vector<BaseStation> bss;
    for (Eigen::Index j = 0; j < B; ++j)
        bss.push_back({{100.0 * static_cast<double>(j), 0.0}, bs_dbm[static_cast<std::size_t>(j)], j == 0 ? 100.0 : 10.0,
                       dof, std::nullopt});
    std::vector<User> users;
    for (Eigen::Index k = 0; k < K; ++k)
        users.push_back({{0.0, 10.0 * static_cast<double>(k)}, user_dbm[static_cast<std::size_t>(k)],
                         serving[static_cast<std::size_t>(k)]});
    return Scenario(std::move(bss), std::move(users), std::move(g), Eigen::MatrixXi::Ones(K, B), 1.0, 0.0);
}

// Two small cells, one user each, symmetric cross gains of -10 dB.
Scenario two_cells()
{
    return explicit_network({{-20, 0, -10}, {-20, -10, 0}}, {1, 2}, {20, 10, 10}, {10, 10});
}

// One small cell with two users plus one macro user.
Scenario cell_and_macro()
{
    return explicit_network({{-20, 0}, {-30, -10}, {-10, -20}}, {1, 1, 0}, {20, 10}, {10, 10, 10});
}

harness::ExperimentConfig quick_config()
{
    harness::ExperimentConfig c;
    c.n_sbs = {2, 3};
    c.n_users = {8};
    c.trials = 3;
    c.seed = 42;
    c.methods = {opt::Method::no_nulling, opt::Method::heuristic, opt::Method::cutting_plane,
                 opt::Method::upper_bound_p4};
    return c;
}

}  // namespace

// ---------------------------------------------------------------- hetnet

TEST_CASE("path loss families", "[hetnet]")
{
    const Position o{};
    CHECK_THAT(path_loss_db(o, {1, 0}, LinkClass::macro), WithinAbs(38.0, 1e-12));
    CHECK_THAT(path_gain(o, {1, 0}, LinkClass::macro), WithinRel(std::pow(10.0, -3.8), 1e-12));
    CHECK_THAT(path_loss_db(o, {0.2, 0}, LinkClass::small_indoor), WithinAbs(38.46, 1e-12));
    CHECK_THAT(path_loss_db(o, {0, 0}, LinkClass::small_outdoor), WithinAbs(30.5, 1e-12));
    CHECK_THAT(path_loss_db(o, {200, 0}, LinkClass::macro) - path_loss_db(o, {100, 0}, LinkClass::macro),
               WithinAbs(3.5 * 10.0 * std::log10(2.0), 1e-12));
    CHECK_THAT(path_loss_db(o, {300, 400}, LinkClass::macro), WithinAbs(132.4640, 1e-4));

    PathLossModels custom;
    custom.small_outdoor = {10.0, 20.0};
    CHECK_THAT(path_loss_db(o, {10, 0}, LinkClass::small_outdoor, custom), WithinAbs(30.0, 1e-12));
}

TEST_CASE("scenario validation", "[hetnet]")
{
    const Eigen::MatrixXd g = Eigen::MatrixXd::Constant(2, 2, -10.0);
    const Eigen::MatrixXi q = Eigen::MatrixXi::Ones(2, 2);
    auto bss = [](int d0, int d1) {
        return std::vector<BaseStation>{{{}, 40, 100, d0, std::nullopt}, {{50, 0}, 25, 10, d1, std::nullopt}};
    };
    const std::vector<User> users{{{1, 1}, 10, 0}, {{50, 1}, 15, 1}};

    CHECK_NOTHROW(Scenario(bss(2, 2), users, g, q));
    CHECK_THROWS_AS(Scenario(bss(1, 2), users, g, q), InfeasibleScenario);
    try {
        Scenario(bss(2, 1), users, g, q);
        FAIL("expected rejection");
    } catch (const InfeasibleScenario& e) {
        CHECK(e.bs() == 1);
    }
    CHECK_THROWS_AS(Scenario({}, {}, Eigen::MatrixXd(0, 0), Eigen::MatrixXi(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(Scenario(bss(2, 2), {{{1, 1}, 10, 2}, {{50, 1}, 15, 1}}, g, q), std::invalid_argument);
    CHECK_THROWS_AS(Scenario(bss(2, 2), users, Eigen::MatrixXd::Zero(2, 3), q), std::invalid_argument);
    CHECK_THROWS_AS(Scenario(bss(2, 2), users, g, Eigen::MatrixXi::Zero(2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(Scenario(bss(2, 2), users, g, q, 0.0), std::invalid_argument);

    auto with_array = bss(12, 12);
    with_array[1].array = nested_positions(2, 2);
    CHECK_THROWS_AS(Scenario(with_array, users, g, q), std::invalid_argument);
    with_array[1].dof_budget = 11;
    CHECK_NOTHROW(Scenario(with_array, users, g, q));
}

TEST_CASE("rejection happens exactly when the serving load does not fit", "[hetnet]")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const auto s = fixture::random_scenario(rng, {.users = 4, .small_cells = 2});
        std::vector<BaseStation> bss = s.base_stations();
        const int j = static_cast<int>(rng() % bss.size());
        const int need = s.base_load(j) + 1;
        bss[static_cast<std::size_t>(j)].dof_budget = need;
        CHECK_NOTHROW(Scenario(bss, s.users(), s.gain_db_matrix(), s.multipath_matrix(), 1.0, 0.0));
        if (need > 1) {
            bss[static_cast<std::size_t>(j)].dof_budget = need - 1;
            CHECK_THROWS_AS(Scenario(bss, s.users(), s.gain_db_matrix(), s.multipath_matrix(), 1.0, 0.0),
                            InfeasibleScenario);
        }
    }
}

TEST_CASE("small cell rates by hand", "[hetnet]")
{
    const auto s = two_cells();
    auto n = NullingAssignment::zeros(s);
    CHECK_THAT(sum_rate(s, n), WithinRel(4.0 * std::log(51.0), 1e-12));
    CHECK_THAT(rate_small_cell_user(s, n, 0, 1), WithinRel(2.0 * std::log(51.0), 1e-12));

    // Nulling user 0 at SBS 2 clears user 0's downlink and user 1's uplink.
    n.set(0, 2, 1);
    CHECK_THAT(sum_rate(s, n), WithinRel(2.0 * std::log(51.0) + 2.0 * std::log(101.0), 1e-12));
    n.set(1, 1, 1);
    CHECK_THAT(sum_rate(s, n), WithinRel(4.0 * std::log(101.0), 1e-12));
    CHECK_THAT(sum_rate_bits(s, n), WithinRel(4.0 * std::log2(101.0), 1e-12));

    CHECK_THROWS_AS(rate_small_cell_user(s, n, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(rate_macro_user(s, n, 0), std::invalid_argument);
}

TEST_CASE("macro user rates by hand", "[hetnet]")
{
    const auto s = cell_and_macro();
    const auto n0 = NullingAssignment::zeros(s);
    const double mu = std::log(1 + 100 / 1.11) + std::log(1 + 1000 / 1.1);
    const double sue0 = std::log(1 + 100 / 2.1) + std::log(101.0);
    const double sue1 = std::log(1 + 10 / 11.1) + std::log(11.0);
    CHECK_THAT(rate_macro_user(s, n0, 2), WithinRel(mu, 1e-12));
    CHECK_THAT(rate_small_cell_user(s, n0, 0, 1), WithinRel(sue0, 1e-12));
    CHECK_THAT(rate_small_cell_user(s, n0, 1, 1), WithinRel(sue1, 1e-12));
    CHECK_THAT(sum_rate(s, n0), WithinRel(mu + sue0 + sue1, 1e-12));

    // Both SUEs nulled at the MBS: the MU uplink only sees the noise floor.
    auto n = n0;
    n.set(0, 0, 1);
    n.set(1, 0, 1);
    CHECK_THAT(link_rate(s, n, uplink_budget(s, 2)), WithinRel(std::log(101.0), 1e-12));

    // Without small cells both links are interference free.
    const auto lone = explicit_network({{-10}}, {0}, {20}, {10});
    CHECK_THAT(sum_rate(lone, NullingAssignment::zeros(lone)), WithinRel(std::log(101.0) + std::log(1001.0), 1e-12));
}

TEST_CASE("library rates agree with the oracle", "[hetnet]")
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        const auto s = fixture::random_scenario(rng, {.users = 4, .small_cells = 2});
        oracle::for_each_feasible(s, [&](const NullingAssignment& n) {
            REQUIRE_THAT(sum_rate(s, n), WithinRel(oracle::sum_rate(s, n), 1e-12));
        });
    }
}

TEST_CASE("empty network and additivity", "[hetnet]")
{
    const auto empty = explicit_network({}, {}, {40, 25}, {});
    CHECK(sum_rate(empty, NullingAssignment::zeros(empty)) == 0.0);
    CHECK_FALSE(outage_probability_mu(empty, NullingAssignment::zeros(empty)).has_value());

    std::mt19937_64 rng(8);
    const auto s = fixture::random_scenario(rng, {.users = 5, .small_cells = 2});
    const auto n = NullingAssignment::zeros(s);
    double total = 0.0;
    for (int k = 0; k < s.num_users(); ++k) {
        const double r = user_rate(s, n, k);
        CHECK(std::isfinite(r));
        CHECK(r >= 0.0);
        total += r;
    }
    CHECK(sum_rate(s, n) == total);
}

TEST_CASE("single flips never lower the sum rate", "[hetnet]")
{
    std::mt19937_64 rng(29);
    for (int t = 0; t < 100; ++t) {
        const auto s = fixture::random_scenario(rng, {.users = 3, .small_cells = 2});
        oracle::for_each_feasible(s, [&](const NullingAssignment& n) {
            const double base = sum_rate(s, n);
            for (int j = 0; j < s.num_bs(); ++j)
                for (int k = 0; k < s.num_users(); ++k) {
                    if (n(k, j))
                        continue;
                    auto m = n;
                    m.set(k, j, 1);
                    if (!find_violation(s, m))
                        REQUIRE(sum_rate(s, m) >= base);
                }
        });
    }
}

TEST_CASE("assignment constraints", "[hetnet]")
{
    const auto s = cell_and_macro();
    auto n = NullingAssignment::zeros(s);
    CHECK_FALSE(find_violation(s, n));

    n.set(0, 1, 1);
    auto v = find_violation(s, n);
    REQUIRE(v);
    CHECK(v->kind == ConstraintKind::serving_user);
    CHECK(v->bs == 1);
    CHECK(v->user == 0);
    CHECK_THROWS_AS(sum_rate(s, n), InfeasibleAssignment);

    CHECK(find_violation(s, NullingAssignment(2, 2))->kind == ConstraintKind::shape);

    // Budget 3 at the MBS: one serving path, one noise row, one null.
    const auto tight = explicit_network({{-20, 0}, {-30, -10}, {-10, -20}}, {1, 1, 0}, {20, 10}, {10, 10, 10}, 3);
    auto m = NullingAssignment::zeros(tight);
    m.set(0, 0, 1);
    CHECK_FALSE(find_violation(tight, m));
    CHECK(dof_rows_used(tight, m, 0) == 3);
    m.set(1, 0, 1);
    v = find_violation(tight, m);
    REQUIRE(v);
    CHECK(v->kind == ConstraintKind::dof_budget);
    CHECK(v->bs == 0);
    CHECK(oracle::feasible(tight, m) == !find_violation(tight, m));
}

TEST_CASE("macro user outage", "[hetnet]")
{
    // MU 0 sees 0.1 against 1 + 1; MU 1 sees 10 against 1 + 0.01.
    const auto s = explicit_network({{-30, -10}, {-10, -30}}, {0, 0}, {20, 10}, {10, 10});
    const auto n = NullingAssignment::zeros(s);
    CHECK(*outage_probability_mu(s, n, {0.0}) == 0.5);
    CHECK(*outage_probability_mu(s, n, {-std::numeric_limits<double>::infinity()}) == 0.0);
    CHECK(*outage_probability_mu(s, n, {std::numeric_limits<double>::infinity()}) == 1.0);
    CHECK_THAT(mu_downlink_sinr(s, n, 0), WithinRel(0.05, 1e-12));
    CHECK_THAT(mu_downlink_sinr(s, n, 0, true), WithinRel(5.0, 1e-12));
    CHECK(*outage_probability_mu(s, n, {0.0, true}) == 0.0);

    auto nulled = n;
    nulled.set(0, 1, 1);
    CHECK_THAT(mu_downlink_sinr(s, nulled, 0), WithinRel(0.1, 1e-12));
    CHECK(*outage_probability_mu(s, nulled, {-12.0}) == 0.0);
    CHECK(*outage_probability_mu(s, n, {-12.0}) == 0.5);

    const auto lone = explicit_network({{-10}, {-40}}, {0, 0}, {20}, {10, 10});
    CHECK(*outage_probability_mu(lone, NullingAssignment::zeros(lone), {-30.0}) == 0.0);
}

TEST_CASE("pattern rows match the DoF accounting", "[hetnet][beam]")
{
    auto c = quick_config();
    for (int trial = 0; trial < 5; ++trial) {
        const auto gen = harness::generate_scenario(c, 3, 12, trial);
        const auto& s = gen.scenario;
        const auto n = opt::heuristic_assignment(s);
        REQUIRE_FALSE(find_violation(s, n));
        for (int j = 0; j < s.num_bs(); ++j) {
            const auto spec = nulling_spec_for_bs(s, n, j, gen.directions);
            CHECK(static_cast<int>(pattern_row_count(spec)) == dof_rows_used(s, n, j));
            CHECK(fits_dof_budget(pattern_row_count(spec), static_cast<std::size_t>(s.dof(j))));
        }
    }
}

// ---------------------------------------------------------------- harness

TEST_CASE("config validation", "[harness]")
{
    harness::ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = [](auto edit) {
        harness::ExperimentConfig c;
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](auto& c) { c.small_radius = 0; }).validate(), harness::ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.trials = 0; }).validate(), harness::ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.methods.clear(); }).validate(), harness::ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.n_sbs.clear(); }).validate(), harness::ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.n_users = {10, 20}; }).validate(), harness::ConfigError);
    CHECK_THROWS_AS(bad([](auto& c) { c.dof_sbs = 12; }).validate(), harness::ConfigError);
    CHECK(c.min_separation() == 100.0);
}

TEST_CASE("sweep points", "[harness]")
{
    auto c = quick_config();
    CHECK(harness::sweep_param(c) == harness::SweepParam::n_sbs);
    const auto pts = harness::sweep_points(c);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].n_sbs == 3);
    CHECK(pts[1].n_users == 8);
    c.n_sbs = {4};
    c.n_users = {10, 20, 30};
    CHECK(harness::sweep_param(c) == harness::SweepParam::n_users);
    CHECK(harness::sweep_points(c).size() == 3);
    CHECK(harness::sweep_points(c)[2].value(harness::SweepParam::n_users) == 30);
}

TEST_CASE("scenario generation", "[harness]")
{
    harness::ExperimentConfig c;

    const auto macro_only = harness::generate_scenario(c, 0, 20, 0);
    CHECK(macro_only.scenario.num_bs() == 1);
    for (int k = 0; k < 20; ++k)
        CHECK(macro_only.scenario.x(k, 0));

    const auto a = harness::generate_scenario(c, 4, 30, 7);
    const auto b = harness::generate_scenario(c, 4, 30, 7);
    CHECK(a.scenario.gain_db_matrix() == b.scenario.gain_db_matrix());
    CHECK(a.scenario.multipath_matrix() == b.scenario.multipath_matrix());
    CHECK(a.directions == b.directions);
    CHECK(io::to_json(a.scenario) == io::to_json(b.scenario));
    CHECK(io::to_json(harness::generate_scenario(c, 4, 30, 8).scenario) != io::to_json(a.scenario));

    const auto& s = a.scenario;
    for (int k = 0; k < s.num_users(); ++k) {
        CHECK(distance(s.user(k).position, {}) <= c.macro_radius);
        for (int j = 0; j < s.num_bs(); ++j) {
            CHECK(s.q(k, j) >= 1);
            CHECK(s.q(k, j) <= c.q_max);
            CHECK(a.directions[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)].size() == static_cast<std::size_t>(s.q(k, j)));
        }
    }
    for (int i = 1; i < s.num_bs(); ++i)
        for (int j = i + 1; j < s.num_bs(); ++j)
            CHECK(distance(s.bs(i).position, s.bs(j).position) >= c.min_separation());

    // Fewer cells reuse the same placements.
    const auto fewer = harness::generate_scenario(c, 2, 30, 7);
    if (fewer.attempts == 1 && a.attempts == 1)
        for (int j = 1; j <= 2; ++j)
            CHECK(fewer.scenario.bs(j).position == s.bs(j).position);
}

TEST_CASE("association follows coverage", "[harness]")
{
    harness::ExperimentConfig c;
    c.dof_mbs = 2000;
    c.dof_sbs = 11;
    const auto gen = harness::generate_scenario(c, 50, 500, 0);
    const auto& s = gen.scenario;
    int served = 0;
    for (int k = 0; k < s.num_users(); ++k) {
        const auto& u = s.user(k);
        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 1; j < s.num_bs(); ++j) {
            const double d = distance(u.position, s.bs(j).position);
            if (d <= c.small_radius && d < best) {
                best = d;
                nearest = j;
            }
        }
        CHECK(s.serving(k) == nearest);
        if (nearest == 0)
            CHECK(u.tx_power_dbm == harness::mue_power_dbm(c, distance(u.position, {})));
        else {
            CHECK(u.tx_power_dbm == c.powers.sue);
            ++served;
        }
        const auto cls = nearest == 0 ? LinkClass::small_outdoor : LinkClass::small_indoor;
        if (nearest != 0)
            CHECK_THAT(s.gain_db(k, nearest), WithinAbs(-path_loss_db(s.bs(nearest).position, u.position, cls), 1e-9));
        CHECK_THAT(s.gain_db(k, 0), WithinAbs(-path_loss_db({}, u.position, LinkClass::macro), 1e-9));
    }
    CHECK(served > 0);
}

TEST_CASE("MUE power rings", "[harness]")
{
    harness::ExperimentConfig c;
    CHECK(harness::mue_power_dbm(c, 0.0) == 10.0);
    CHECK(harness::mue_power_dbm(c, 440.0) == 10.0);
    CHECK(harness::mue_power_dbm(c, 450.0) == 15.0);
    CHECK(harness::mue_power_dbm(c, 1000.0) == 30.0);
    CHECK(harness::mue_power_dbm(c, 5000.0) == 30.0);
}

TEST_CASE("generation gives up on impossible budgets", "[harness]")
{
    harness::ExperimentConfig c;
    c.dof_mbs = 1;
    CHECK_THROWS_AS(harness::generate_scenario(c, 0, 5, 0), harness::GenerationFailed);
    c.dof_mbs = 100;
    c.macro_radius = 60;
    CHECK_THROWS_AS(harness::generate_scenario(c, 3, 5, 0), harness::GenerationFailed);
}

TEST_CASE("experiment rows", "[harness]")
{
    const auto c = quick_config();
    const auto rows = harness::run_experiment(c);
    REQUIRE(rows.size() == 2 * 3 * 4);
    for (const auto& r : rows) {
        REQUIRE(r.ok());
        CHECK(r.sum_rate_bps_hz >= 0.0);
        CHECK(r.sum_rate_bps == r.sum_rate_bps_hz * c.bandwidth);
        if (!std::isnan(r.mu_outage_prob)) {
            CHECK(r.mu_outage_prob >= 0.0);
            CHECK(r.mu_outage_prob <= 1.0);
        }
        const auto gen = harness::generate_scenario(c, r.n_sbs, r.n_users, r.trial_id);
        if (r.method != opt::Method::upper_bound_p4)
            CHECK(oracle::feasible(gen.scenario, r.assignment));
        CHECK_THAT(r.sum_rate_bps_hz,
                   WithinRel(oracle::sum_rate(gen.scenario, r.assignment) / std::numbers::ln2, 1e-12));
        if (r.method == opt::Method::no_nulling)
            CHECK(r.assignment.count() == 0);
    }
    for (std::size_t i = 0; i + 3 < rows.size(); i += 4)
        CHECK(rows[i + 3].linearized >= rows[i + 2].surrogate);
    CHECK_FALSE(harness::method_failing_everywhere(c, rows));
}

TEST_CASE("methods that cannot run are recorded per row", "[harness]")
{
    auto c = quick_config();
    c.n_sbs = {1};
    c.n_users = {12};
    c.trials = 2;
    c.methods = {opt::Method::no_nulling, opt::Method::lp_unimodular, opt::Method::brute_force};
    const auto rows = harness::run_experiment(c);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].ok());
    CHECK(rows[1].status == "not_special_case");
    CHECK(rows[2].status == "too_large");
    CHECK(std::isnan(rows[1].sum_rate_bps_hz));
    CHECK(harness::method_failing_everywhere(c, rows) == opt::Method::lp_unimodular);

    c.fixed_paths = 1;
    const auto fixed = harness::run_experiment(c);
    CHECK(fixed[1].ok());
}

TEST_CASE("aggregation", "[harness]")
{
    harness::Moments one;
    one.add(3.0);
    CHECK(one.mean == 3.0);
    CHECK(one.stderr_of_mean() == 0.0);

    harness::Moments two;
    two.add(4.0);
    two.add(6.0);
    CHECK(two.mean == 5.0);
    CHECK_THAT(two.stderr_of_mean(), WithinAbs(1.0, 1e-15));

    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(3.0, 2.0);
    harness::Moments all, left, right;
    for (int i = 0; i < 200; ++i) {
        const double x = nd(rng);
        all.add(x);
        (i < 70 ? left : right).add(x);
    }
    left.merge(right);
    CHECK(left.n == all.n);
    CHECK_THAT(left.mean, WithinRel(all.mean, 1e-12));
    CHECK_THAT(left.m2, WithinRel(all.m2, 1e-12));

    std::vector<harness::TrialReport> rows(3);
    rows[0].n_sbs = 2;
    rows[0].sum_rate_bps_hz = 4;
    rows[1].n_sbs = 2;
    rows[1].sum_rate_bps_hz = 6;
    rows[2].n_sbs = 2;
    rows[2].sum_rate_bps_hz = 100;
    rows[2].status = "solver_failed";
    const auto summary = harness::aggregate(rows, harness::SweepParam::n_sbs);
    REQUIRE(summary.size() == 3);
    CHECK(summary[0].metric == "sum_rate_bps_hz");
    CHECK(summary[0].moments.n == 2);
    CHECK(harness::summary_mean(summary, 2, opt::Method::no_nulling, "sum_rate_bps_hz") == 5.0);
    CHECK(summary[2].moments.n == 0);
    CHECK(std::isnan(harness::summary_mean(summary, 2, opt::Method::no_nulling, "mu_outage_prob")));
}

TEST_CASE("CSV output", "[harness]")
{
    CHECK(harness::format_float(1.0 / 3.0) == "0.333333333");
    CHECK(harness::format_float(std::nan("")) == "nan");
    CHECK(harness::format_float(4e6) == "4000000");

    const auto c = quick_config();
    const auto rows = harness::run_experiment(c);
    std::ostringstream a, b, t;
    harness::write_trials_csv(a, rows, false);
    harness::write_trials_csv(b, harness::run_experiment(c), false);
    CHECK(a.str() == b.str());
    const auto text = a.str();
    CHECK(text.rfind(std::string(harness::trials_header) + "\n", 0) == 0);
    CHECK(text.find(",NA,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rows.size() + 1));
    const auto second = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
    CHECK(second.rfind("0,2,8,no_nulling,", 0) == 0);

    std::ostringstream sum;
    harness::write_summary_csv(sum, harness::aggregate(rows, harness::SweepParam::n_sbs));
    const auto s = sum.str();
    CHECK(s.rfind("sweep_value,method,metric,mean,stderr,n\n2,no_nulling,sum_rate_bps_hz,", 0) == 0);
}

// ---------------------------------------------------------------- io

TEST_CASE("scenario JSON round trip", "[io]")
{
    harness::ExperimentConfig c;
    const auto gen = harness::generate_scenario(c, 3, 15, 2);
    const auto j = io::to_json(gen.scenario);
    const auto back = io::scenario_from_json(io::Json::parse(j.dump()));
    CHECK(io::to_json(back) == j);
    CHECK(back.gain_db_matrix() == gen.scenario.gain_db_matrix());
    CHECK(back.multipath_matrix() == gen.scenario.multipath_matrix());
    CHECK(back.noise_dbm() == c.noise_dbm);
    const auto n = opt::heuristic_assignment(gen.scenario);
    CHECK(sum_rate(back, n) == sum_rate(gen.scenario, n));

    auto broken = j;
    broken["association"][0][0] = 1 - broken["association"][0][0].get<int>();
    CHECK_THROWS(io::scenario_from_json(broken));
}

TEST_CASE("geometry JSON", "[io]")
{
    const auto g = ArrayGeometry({0, 1, 4, 9}, 0.5);
    const auto j = io::to_json(g);
    CHECK(j["positions"] == io::Json::array({0, 1, 4, 9}));
    CHECK(j["unit_spacing_halves_lambda"] == 0.5);
    CHECK(io::geometry_from_json(j) == g);
    CHECK_THROWS(io::geometry_from_json(io::Json::parse(R"({"positions":[2,1]})")));
}

TEST_CASE("config JSON", "[io]")
{
    const auto c = io::config_from_json(io::Json::parse(R"({
        "n_sbs": [2, 4], "n_users": 12, "trials": 5, "seed": 9,
        "methods": ["no_nulling", "heuristic"],
        "powers": {"mue": [12, 24]}, "sbs_array": {"n1": 3, "n2": 2},
        "path_loss": {"macro": {"slope_db": 30}}, "fixed_paths": 2
    })"));
    CHECK(c.n_sbs == std::vector<int>{2, 4});
    CHECK(c.n_users == std::vector<int>{12});
    CHECK(c.trials == 5);
    CHECK(c.seed == 9);
    CHECK(c.methods == std::vector<opt::Method>{opt::Method::no_nulling, opt::Method::heuristic});
    CHECK(c.powers.mue == std::vector<double>{12, 24});
    CHECK(c.powers.mbs == 40.0);
    CHECK(c.sbs_array_n1 == 3);
    CHECK(c.path_loss.macro.slope_db == 30.0);
    CHECK(c.path_loss.macro.intercept_db == 38.0);
    CHECK(c.fixed_paths == 2);

    const auto again = io::config_from_json(io::to_json(c));
    CHECK(io::to_json(again) == io::to_json(c));

    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"trails": 3})")), harness::ConfigError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"powers": {"mb": 3}})")), harness::ConfigError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"trials": "many"})")), harness::ConfigError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"methods": ["fastest"]})")), harness::ConfigError);
    CHECK_THROWS_AS(io::config_from_json(io::Json::parse(R"({"trials": 0})")), harness::ConfigError);
}

TEST_CASE("solve report JSON", "[io]")
{
    const auto s = two_cells();
    const auto rep = opt::solve(s, opt::Method::heuristic);
    const auto j = io::to_json(rep);
    CHECK(j["method"] == "heuristic");
    CHECK(j["objective_linearized"].is_null());
    CHECK(j["objective_exact_rate_bps_hz"].get<double>() == rep.objective_exact_rate);
    CHECK(j["assignment"].size() == 2);
}
