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

// nestnull command line: co-array reports, beam patterns, single solves
// and Monte Carlo experiments.

#include "nestnull/nestnull.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace nestnull;
namespace fs = std::filesystem;

enum Exit { ok = 0, config_error = 2, generation_failed = 3, solver_failed = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

io::Json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path);
    try {
        return io::Json::parse(in);
    } catch (const io::Json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw UsageError("cannot write " + path.string());
    return out;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw UsageError("not a number: " + tok);
        out.push_back(v);
    }
    return out;
}

std::vector<double> degrees_to_radians(const std::vector<double>& deg)
{
    std::vector<double> out;
    for (double d : deg)
        out.push_back(d * std::numbers::pi / 180.0);
    return out;
}

int cmd_coarray(int n1, int n2, bool json)
{
    const auto g = nested_positions(n1, n2);
    const auto ca = difference_coarray(g);
    if (json) {
        io::Json j{{"geometry", io::to_json(g)}, {"coarray", io::to_json(ca)}, {"max_dof", max_dof(g.size())}};
        std::cout << j.dump(2) << '\n';
        return ok;
    }
    std::cout << "positions:";
    for (auto p : g.positions())
        std::cout << ' ' << p;
    std::cout << "\nsensors: " << g.size() << "\nlags: " << ca.lags.size() << " (" << ca.lags.front() << " .. "
              << ca.lags.back() << ")\ncontiguous_aperture: " << ca.contiguous_aperture
              << "\nhole_free: " << (ca.hole_free() ? "yes" : "no") << "\nmax_dof: " << max_dof(g.size()) << '\n';
    return ok;
}

int cmd_pattern(const std::string& geometry, const std::string& desired, const std::string& nulls, int grid,
                bool keep_noise, const std::string& out_path)
{
    const auto g = io::geometry_from_json(read_json(geometry));
    NullingSpec spec;
    spec.desired = degrees_to_radians(parse_list(desired));
    spec.nulls = degrees_to_radians(parse_list(nulls));
    spec.null_noise = !keep_noise;
    const auto w = solve_weights(g, spec);
    auto out = open_out(out_path);
    out << "theta_deg,re,im,abs\n";
    char buf[128];
    for (int i = 0; i < grid; ++i) {
        const double deg = grid == 1 ? 0.0 : -90.0 + 180.0 * i / (grid - 1);
        const auto b = beam_pattern(g, w.w, deg * std::numbers::pi / 180.0);
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", deg, b.real(), b.imag(), std::abs(b));
        out << buf;
    }
    std::cerr << "solve residual " << w.residual << '\n';
    return ok;
}

int cmd_solve(const std::string& scenario, const std::string& method, int max_order, const std::string& out_path,
              const std::string& ip_out)
{
    const auto s = io::scenario_from_json(read_json(scenario));
    const auto m = opt::parse_method(method);
    opt::SolverOptions o;
    o.surrogate.max_order = max_order;
    std::optional<opt::Surrogate> sur;
    if (opt::needs_surrogate(m) || !ip_out.empty())
        sur = opt::build_surrogate(s, o.surrogate);
    if (!ip_out.empty()) {
        auto os = open_out(ip_out);
        const auto prog = m == opt::Method::upper_bound_p4 ? opt::build_p4(s, *sur) : opt::build_p3(s, *sur);
        opt::write_integer_program(os, prog.ip);
    }
    opt::SolveReport rep;
    try {
        rep = opt::solve(s, m, o, sur ? &*sur : nullptr);
    } catch (const opt::NotSpecialCase&) {
        throw;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        std::cerr << "solver failed: " << e.what() << '\n';
        return solver_failed;
    }
    auto out = open_out(out_path);
    out << io::to_json(rep).dump(2) << '\n';
    std::cout << method << ": " << rep.objective_exact_rate << " bits/s/Hz, " << rep.assignment.count() << " nulls, "
              << rep.cuts_added << " cuts\n";
    return ok;
}

int run_and_write(const harness::ExperimentConfig& c, const fs::path& dir, bool quiet)
{
    const auto rows = harness::run_experiment(c, [&](const harness::SweepPoint& p, int t) {
        if (!quiet && t == 0)
            std::cerr << sweep_param_name(harness::sweep_param(c)) << " = " << p.value(harness::sweep_param(c)) << '\n';
    });
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "trials.csv");
        harness::write_trials_csv(out, rows, c.record_solve_time);
    }
    {
        auto out = open_out(dir / "summary.csv");
        harness::write_summary_csv(out, harness::aggregate(rows, harness::sweep_param(c)));
    }
    if (const auto m = harness::method_failing_everywhere(c, rows)) {
        std::cerr << "method " << opt::method_name(*m) << " failed on every trial\n";
        return solver_failed;
    }
    return ok;
}

harness::ExperimentConfig load_config(const std::string& path, std::optional<int> trials,
                                      std::optional<std::uint64_t> seed)
{
    auto c = io::config_from_json(read_json(path));
    if (trials)
        c.trials = *trials;
    if (seed)
        c.seed = *seed;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nested-array interference nulling for two-tier networks"};
    app.require_subcommand(1);

    auto* ca = app.add_subcommand("coarray", "Nested array geometry and its difference co-array");
    int n1 = 0, n2 = 0;
    bool as_json = false;
    ca->add_option("--n1", n1, "Inner level sensors")->required();
    ca->add_option("--n2", n2, "Outer level sensors")->required();
    ca->add_flag("--json", as_json, "Print JSON");

    auto* pat = app.add_subcommand("pattern", "Sample the co-array beam pattern of a nulling solve");
    std::string geometry, desired, nulls, pat_out;
    int grid = 361;
    bool keep_noise = false;
    pat->add_option("--geometry", geometry, "Geometry JSON file")->required();
    pat->add_option("--desired", desired, "Desired directions, degrees, comma separated")->required();
    pat->add_option("--nulls", nulls, "Null directions, degrees, comma separated")->default_val("");
    pat->add_option("--grid", grid, "Number of angles from -90 to 90 degrees")->check(CLI::PositiveNumber);
    pat->add_flag("--keep-noise", keep_noise, "Do not null the noise term");
    pat->add_option("--out", pat_out, "Output CSV")->required();

    auto* sol = app.add_subcommand("solve", "Solve one scenario");
    std::string scenario, method, sol_out, ip_out;
    int max_order = 3;
    sol->add_option("--scenario", scenario, "Scenario JSON file")->required();
    sol->add_option("--method", method, "Method name")->required();
    sol->add_option("--max-order", max_order, "Truncation order of the product expansion")->check(CLI::PositiveNumber);
    sol->add_option("--out", sol_out, "Report JSON file")->required();
    sol->add_option("--ip-out", ip_out, "Also write the linearized 0-1 program as text");

    auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
    std::string config, out_dir;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    sim->add_option("--config", config, "Config JSON file")->required();
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_option("--trials", trials, "Override the trial count");
    sim->add_option("--seed", seed, "Override the seed");
    sim->add_flag("--quiet", quiet, "No progress output");

    auto* sw = app.add_subcommand("sweep", "Run an experiment over one parameter");
    std::string param, values;
    sw->add_option("--config", config, "Config JSON file")->required();
    sw->add_option("--param", param, "Swept parameter")->required()->check(CLI::IsMember({"n_sbs", "n_users"}));
    sw->add_option("--values", values, "Comma separated values")->required();
    sw->add_option("--out", out_dir, "Output directory")->required();
    sw->add_option("--trials", trials, "Override the trial count");
    sw->add_option("--seed", seed, "Override the seed");
    sw->add_flag("--quiet", quiet, "No progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    try {
        if (*ca)
            return cmd_coarray(n1, n2, as_json);
        if (*pat)
            return cmd_pattern(geometry, desired, nulls, grid, keep_noise, pat_out);
        if (*sol)
            return cmd_solve(scenario, method, max_order, sol_out, ip_out);
        if (*sim)
            return run_and_write(load_config(config, trials, seed), out_dir, quiet);
        if (*sw) {
            auto c = load_config(config, trials, seed);
            std::vector<int> list;
            for (double v : parse_list(values)) {
                if (v != static_cast<int>(v))
                    throw UsageError("sweep values must be integers");
                list.push_back(static_cast<int>(v));
            }
            if (list.empty())
                throw UsageError("--values is empty");
            if (param == "n_sbs") {
                c.n_sbs = list;
                c.n_users.resize(1);
            } else {
                c.n_users = list;
                c.n_sbs.resize(1);
            }
            c.validate();
            return run_and_write(c, out_dir, quiet);
        }
    } catch (const harness::GenerationFailed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return generation_failed;
    } catch (const opt::SolverFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return solver_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
    return ok;
}
