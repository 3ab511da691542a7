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
 * @file io.hpp
 * JSON documents for geometries, scenarios, solve reports and experiment
 * configs. Unknown config keys are rejected so typos surface early.
 */
#pragma once

#include "nestnull/coarray.hpp"
#include "nestnull/harness.hpp"
#include "nestnull/hetnet.hpp"
#include "nestnull/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace nestnull::io {

using Json = nlohmann::json;

// ---------------------------------------------------------------- geometry

inline Json to_json(const ArrayGeometry& g)
{
    const auto p = g.positions();
    return Json{{"unit_spacing_halves_lambda", g.spacing_half_wavelengths()},
                {"positions", std::vector<std::int64_t>(p.begin(), p.end())}};
}

inline ArrayGeometry geometry_from_json(const Json& j)
{
    return ArrayGeometry(j.at("positions").get<std::vector<std::int64_t>>(),
                         j.value("unit_spacing_halves_lambda", 1.0));
}

inline Json to_json(const CoArray& c)
{
    return Json{{"lags", c.lags}, {"contiguous_aperture", c.contiguous_aperture}, {"hole_free", c.hole_free()}};
}

// ---------------------------------------------------------------- scenario

namespace detail {

inline Json position(Position p)
{
    return Json::array({p.x, p.y});
}

inline Position position(const Json& j)
{
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("position must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

/// NaN and infinities have no JSON form; they become null.
inline Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

}  // namespace detail

inline Json to_json(const Scenario& s)
{
    Json bss = Json::array();
    for (const auto& b : s.base_stations()) {
        Json e{{"position", detail::position(b.position)},
               {"tx_power_dbm", b.tx_power_dbm},
               {"array_gain_ratio", b.array_gain_ratio},
               {"dof_budget", b.dof_budget}};
        if (b.array)
            e["array"] = to_json(*b.array);
        bss.push_back(std::move(e));
    }
    Json users = Json::array();
    for (const auto& u : s.users())
        users.push_back(
            {{"position", detail::position(u.position)}, {"tx_power_dbm", u.tx_power_dbm}, {"serving_bs", u.serving_bs}});
    Json gain = Json::array(), q = Json::array(), x = Json::array();
    for (int k = 0; k < s.num_users(); ++k) {
        Json gr = Json::array(), qr = Json::array(), xr = Json::array();
        for (int j = 0; j < s.num_bs(); ++j) {
            gr.push_back(s.gain_db(k, j));
            qr.push_back(s.q(k, j));
            xr.push_back(s.x(k, j) ? 1 : 0);
        }
        gain.push_back(std::move(gr));
        q.push_back(std::move(qr));
        x.push_back(std::move(xr));
    }
    return Json{{"noise_floor", s.noise_floor()}, {"noise_dbm", s.noise_dbm()}, {"base_stations", bss},
                {"users", users},       {"gain_db", gain},          {"multipath", q},
                {"association", x}};
}

inline Scenario scenario_from_json(const Json& j)
{
    std::vector<BaseStation> bss;
    for (const auto& e : j.at("base_stations")) {
        BaseStation b;
        b.position = detail::position(e.at("position"));
        b.tx_power_dbm = e.at("tx_power_dbm").get<double>();
        b.array_gain_ratio = e.at("array_gain_ratio").get<double>();
        b.dof_budget = e.at("dof_budget").get<int>();
        if (e.contains("array"))
            b.array = geometry_from_json(e.at("array"));
        bss.push_back(std::move(b));
    }
    std::vector<User> users;
    for (const auto& e : j.at("users"))
        users.push_back({detail::position(e.at("position")), e.at("tx_power_dbm").get<double>(),
                         e.at("serving_bs").get<int>()});
    const auto K = static_cast<Eigen::Index>(users.size());
    const auto nb = static_cast<Eigen::Index>(bss.size());
    auto matrix = [&](const char* key, auto& out) {
        const auto& m = j.at(key);
        if (static_cast<Eigen::Index>(m.size()) != K)
            throw std::invalid_argument(std::string(key) + ": one row per user expected");
        for (Eigen::Index k = 0; k < K; ++k) {
            const auto& row = m[static_cast<std::size_t>(k)];
            if (static_cast<Eigen::Index>(row.size()) != nb)
                throw std::invalid_argument(std::string(key) + ": one column per base station expected");
            for (Eigen::Index c = 0; c < nb; ++c)
                row[static_cast<std::size_t>(c)].get_to(out(k, c));
        }
    };
    Eigen::MatrixXd gain(K, nb);
    Eigen::MatrixXi q(K, nb);
    matrix("gain_db", gain);
    matrix("multipath", q);
    if (j.contains("association")) {
        Eigen::MatrixXi x(K, nb);
        matrix("association", x);
        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index c = 0; c < nb; ++c)
                if ((x(k, c) != 0) != (users[static_cast<std::size_t>(k)].serving_bs == c))
                    throw std::invalid_argument("association matrix disagrees with serving_bs of user " +
                                                std::to_string(k));
    }
    return Scenario(std::move(bss), std::move(users), std::move(gain), std::move(q), j.value("noise_floor", 1.0),
                    j.value("noise_dbm", 0.0));
}

// ---------------------------------------------------------------- reports

inline Json assignment_json(const NullingAssignment& n)
{
    Json rows = Json::array();
    for (int k = 0; k < n.num_users(); ++k) {
        Json r = Json::array();
        for (int j = 0; j < n.num_bs(); ++j)
            r.push_back(static_cast<int>(n(k, j)));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Json to_json(const opt::SolveReport& r)
{
    Json j{{"method", opt::method_name(r.method)},
           {"assignment", assignment_json(r.assignment)},
           {"objective_linearized", detail::number(r.objective_linearized)},
           {"objective_surrogate", detail::number(r.objective_surrogate)},
           {"objective_exact_rate_bps_hz", detail::number(r.objective_exact_rate)},
           {"cuts_added", r.cuts_added},
           {"solve_time_ms", r.solve_time_ms}};
    if (r.p2_maximizer)
        j["p2_maximizer"] = assignment_json(*r.p2_maximizer);
    return j;
}

// ---------------------------------------------------------------- config

namespace detail {

inline std::vector<int> int_or_list(const Json& j, const char* key)
{
    if (j.is_number_integer())
        return {j.get<int>()};
    if (j.is_array())
        return j.get<std::vector<int>>();
    throw harness::ConfigError(std::string(key) + " must be an integer or a list of integers");
}

inline void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where)
{
    if (!j.is_object())
        throw harness::ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k))
            throw harness::ConfigError("unknown key '" + k + "' in " + where);
}

inline LogDistanceModel path_model(const Json& j, LogDistanceModel m)
{
    reject_unknown(j, {"intercept_db", "slope_db"}, "path_loss");
    m.intercept_db = j.value("intercept_db", m.intercept_db);
    m.slope_db = j.value("slope_db", m.slope_db);
    return m;
}

}  // namespace detail

inline harness::ExperimentConfig config_from_json(const Json& j)
{
    using harness::ConfigError;
    detail::reject_unknown(j,
                           {"macro_radius", "small_radius", "sbs_min_separation", "n_sbs", "n_users", "bandwidth",
                            "powers", "ratio_mbs", "ratio_sbs", "dof_mbs", "dof_sbs", "sbs_array", "q_max",
                            "fixed_paths", "trials", "seed", "methods", "gamma_out", "outage_array_gain", "epsilon_n",
                            "noise_dbm", "max_order", "per_bs_probability", "term_limit", "path_loss",
                            "path_spread_deg", "record_solve_time"},
                           "config");
    harness::ExperimentConfig c;
    try {
        c.macro_radius = j.value("macro_radius", c.macro_radius);
        c.small_radius = j.value("small_radius", c.small_radius);
        if (j.contains("sbs_min_separation") && !j["sbs_min_separation"].is_null())
            c.sbs_min_separation = j["sbs_min_separation"].get<double>();
        if (j.contains("n_sbs"))
            c.n_sbs = detail::int_or_list(j["n_sbs"], "n_sbs");
        if (j.contains("n_users"))
            c.n_users = detail::int_or_list(j["n_users"], "n_users");
        c.bandwidth = j.value("bandwidth", c.bandwidth);
        if (j.contains("powers")) {
            const auto& p = j["powers"];
            detail::reject_unknown(p, {"mbs", "sbs", "sue", "mue"}, "powers");
            c.powers.mbs = p.value("mbs", c.powers.mbs);
            c.powers.sbs = p.value("sbs", c.powers.sbs);
            c.powers.sue = p.value("sue", c.powers.sue);
            if (p.contains("mue"))
                c.powers.mue = p["mue"].get<std::vector<double>>();
        }
        c.ratio_mbs = j.value("ratio_mbs", c.ratio_mbs);
        c.ratio_sbs = j.value("ratio_sbs", c.ratio_sbs);
        c.dof_mbs = j.value("dof_mbs", c.dof_mbs);
        c.dof_sbs = j.value("dof_sbs", c.dof_sbs);
        if (j.contains("sbs_array")) {
            const auto& a = j["sbs_array"];
            detail::reject_unknown(a, {"n1", "n2"}, "sbs_array");
            c.sbs_array_n1 = a.value("n1", c.sbs_array_n1);
            c.sbs_array_n2 = a.value("n2", c.sbs_array_n2);
        }
        c.q_max = j.value("q_max", c.q_max);
        if (j.contains("fixed_paths") && !j["fixed_paths"].is_null())
            c.fixed_paths = j["fixed_paths"].get<int>();
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        if (j.contains("methods")) {
            c.methods.clear();
            for (const auto& m : j["methods"])
                c.methods.push_back(opt::parse_method(m.get<std::string>()));
        }
        c.gamma_out = j.value("gamma_out", c.gamma_out);
        c.outage_array_gain = j.value("outage_array_gain", c.outage_array_gain);
        c.epsilon_n = j.value("epsilon_n", c.epsilon_n);
        c.noise_dbm = j.value("noise_dbm", c.noise_dbm);
        c.max_order = j.value("max_order", c.max_order);
        c.per_bs_probability = j.value("per_bs_probability", c.per_bs_probability);
        c.term_limit = j.value("term_limit", c.term_limit);
        if (j.contains("path_loss")) {
            const auto& p = j["path_loss"];
            detail::reject_unknown(p, {"macro", "small_outdoor", "small_indoor"}, "path_loss");
            if (p.contains("macro"))
                c.path_loss.macro = detail::path_model(p["macro"], c.path_loss.macro);
            if (p.contains("small_outdoor"))
                c.path_loss.small_outdoor = detail::path_model(p["small_outdoor"], c.path_loss.small_outdoor);
            if (p.contains("small_indoor"))
                c.path_loss.small_indoor = detail::path_model(p["small_indoor"], c.path_loss.small_indoor);
        }
        c.path_spread_deg = j.value("path_spread_deg", c.path_spread_deg);
        c.record_solve_time = j.value("record_solve_time", c.record_solve_time);
    } catch (const ConfigError&) {
        throw;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline Json to_json(const harness::ExperimentConfig& c)
{
    Json methods = Json::array();
    for (auto m : c.methods)
        methods.push_back(opt::method_name(m));
    auto model = [](const LogDistanceModel& m) { return Json{{"intercept_db", m.intercept_db}, {"slope_db", m.slope_db}}; };
    return Json{{"macro_radius", c.macro_radius},
                {"small_radius", c.small_radius},
                {"sbs_min_separation", c.min_separation()},
                {"n_sbs", c.n_sbs},
                {"n_users", c.n_users},
                {"bandwidth", c.bandwidth},
                {"powers", {{"mbs", c.powers.mbs}, {"sbs", c.powers.sbs}, {"sue", c.powers.sue}, {"mue", c.powers.mue}}},
                {"ratio_mbs", c.ratio_mbs},
                {"ratio_sbs", c.ratio_sbs},
                {"dof_mbs", c.dof_mbs},
                {"dof_sbs", c.dof_sbs},
                {"sbs_array", {{"n1", c.sbs_array_n1}, {"n2", c.sbs_array_n2}}},
                {"q_max", c.q_max},
                {"fixed_paths", c.fixed_paths ? Json(*c.fixed_paths) : Json(nullptr)},
                {"trials", c.trials},
                {"seed", c.seed},
                {"methods", methods},
                {"gamma_out", c.gamma_out},
                {"outage_array_gain", c.outage_array_gain},
                {"epsilon_n", c.epsilon_n},
                {"noise_dbm", c.noise_dbm},
                {"max_order", c.max_order},
                {"per_bs_probability", c.per_bs_probability},
                {"term_limit", c.term_limit},
                {"path_loss",
                 {{"macro", model(c.path_loss.macro)},
                  {"small_outdoor", model(c.path_loss.small_outdoor)},
                  {"small_indoor", model(c.path_loss.small_indoor)}}},
                {"path_spread_deg", c.path_spread_deg},
                {"record_solve_time", c.record_solve_time}};
}

}  // namespace nestnull::io
