// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The covertbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "covertbeam/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "covertbeam/alignment.hpp"
#include "covertbeam/covertness.hpp"
#include "covertbeam/errors.hpp"
#include "covertbeam/parallel.hpp"
#include "covertbeam/rng.hpp"
#include "covertbeam/throughput.hpp"

namespace covertbeam::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
        throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
    text = trim(text);
    Int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ConfigError("key '" + std::string(key) + "': expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("key '" + std::string(key) + "': expected true or false, got '" + std::string(text) + "'");
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// Trims representation noise from range arithmetic (0.1 + 2 * 0.1 and so on).
double tidy(double x) {
    if (x == 0.0) return 0.0;
    const double scale = std::pow(10.0, 12 - static_cast<int>(std::ceil(std::log10(std::abs(x)))));
    return std::round(x * scale) / scale;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    file << text;
    if (!file) throw ConfigError("failed writing output file '" + path + "'");
}

std::optional<double> mc_throughput(const RunConfig& cfg, const SystemConfig& sys, const DesignPoint& theta) {
    if (cfg.trials == 0) return std::nullopt;
    return t_approx_mc(sys, theta, cfg.trials, cfg.seed).estimate;
}

std::string common_prefix(const RunConfig& cfg) {
    return num(cfg.epsilon) + ',' + num(cfg.kappa_b_db) + ',' + num(cfg.kappa_w_db) + ',' + std::to_string(cfg.L_a) +
           ',' + std::to_string(cfg.L_b);
}

RunConfig with_sweep_value(RunConfig cfg, const std::string& key, double value) {
    if (key == "epsilon") {
        cfg.epsilon = value;
    } else if (key == "kappa_w_db") {
        cfg.kappa_w_db = value;
    } else {
        cfg.set("L_a", num(value));
    }
    return cfg;
}

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::vector<std::string> overrides;
};

RunConfig resolve(const Options& opts) {
    RunConfig cfg = opts.config.empty() ? RunConfig{} : load_config(opts.config);
    for (const auto& o : opts.overrides) apply_override(cfg, o);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.trials) cfg.trials = *opts.trials;
    cfg.system().validate();
    cfg.solver.validate();
    return cfg;
}

int cmd_solve(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const SystemConfig sys = cfg.system();
    const Solution sol = solve(sys, cfg.epsilon, cfg.solver);
    const auto t_mc = sol.feasible() ? mc_throughput(cfg, sys, sol.theta_star) : std::nullopt;
    write_output(out_path, std::string(kCsvHeader) + '\n' + solution_row(cfg, sol, t_mc) + '\n', out);
    return sol.feasible() ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const RunConfig& base, const SweepSpec& spec, const std::string& out_path, std::ostream& out) {
    std::vector<std::string> rows(spec.values.size());
    std::vector<char> feasible(spec.values.size(), 0);
    parallel_for(spec.values.size(), [&](std::size_t i) {
        const RunConfig cfg = with_sweep_value(base, spec.key, spec.values[i]);
        const SystemConfig sys = cfg.system();
        sys.validate();
        const Solution sol = solve(sys, cfg.epsilon, cfg.solver);
        const auto t_mc = sol.feasible() ? mc_throughput(cfg, sys, sol.theta_star) : std::nullopt;
        rows[i] = solution_row(cfg, sol, t_mc);
        feasible[i] = sol.feasible();
    });
    std::string text(kCsvHeader);
    text += '\n';
    for (const auto& r : rows) text += r + '\n';
    write_output(out_path, text, out);
    return std::all_of(feasible.begin(), feasible.end(), [](char f) { return f != 0; }) ? kExitOk : kExitInfeasible;
}

int cmd_oracle(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const SystemConfig sys = cfg.system();
    const OracleResult res = grid_search(sys, cfg.epsilon, cfg.grid);
    const auto t_mc = res.feasible ? mc_throughput(cfg, sys, res.best) : std::nullopt;
    write_output(out_path, std::string(kCsvHeader) + '\n' + oracle_row(cfg, res, t_mc) + '\n', out);
    return res.feasible ? kExitOk : kExitInfeasible;
}

int cmd_trace(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const Solution sol = solve(cfg.system(), cfg.epsilon, cfg.solver);
    std::string text = "iter,nu,P_a,P_d,n_p,lagrangian,objective,kl_slack,rejected_blocks\n";
    for (const auto& r : sol.trace) {
        text += std::to_string(r.iter) + ',' + num(r.nu) + ',' + num(r.theta.P_a) + ',' + num(r.theta.P_d) + ',' +
                num(r.theta.n_p) + ',' + num(r.lagrangian) + ',' + num(r.objective) + ',' + num(r.kl_slack) + ',' +
                std::to_string(r.rejected_blocks) + '\n';
    }
    write_output(out_path, text, out);
    return sol.feasible() ? kExitOk : kExitInfeasible;
}

struct Check {
    std::string suite;
    std::string label;
    double value;
    double bound;
    double std_error;
    bool pass;
};

int cmd_validate(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const SystemConfig sys = cfg.system();
    if (cfg.trials == 0) throw ConfigError("validate needs trials >= 1");
    std::vector<Check> checks;

    // Lower-bound dominance at random (P_a, n_p) points.
    const int np_top = std::max(1, static_cast<int>(std::floor(sys.np_max())));
    for (int i = 0; i < cfg.validate_points; ++i) {
        TrialStream draw(cfg.seed, 0xD0D0'0000ull + static_cast<std::uint64_t>(i));
        const double P_a = std::pow(10.0, -3.0 + 5.0 * draw.uniform());
        const int n_p = 1 + std::min(np_top - 1, static_cast<int>(draw.uniform() * np_top));
        const McEstimate mc = p_align_mc(sys, P_a, n_p, cfg.trials, cfg.seed + static_cast<std::uint64_t>(i));
        const double bound = mc.estimate + 3.0 * mc.std_error;
        const double value = p_lb(sys, P_a, n_p);
        checks.push_back({"dominance", "P_a=" + num(P_a) + ";n_p=" + std::to_string(n_p), value, bound,
                          mc.std_error, value <= bound});
    }

    const Solution sol = solve(sys, cfg.epsilon, cfg.solver);
    double worst_drop = 0.0;
    for (const auto& row : sol.trace) {
        for (std::size_t k = 1; k < row.block_lagrangian.size(); ++k) {
            worst_drop = std::max(worst_drop, row.block_lagrangian[k - 1] - row.block_lagrangian[k]);
        }
    }
    checks.push_back({"monotonicity", "largest_block_drop", worst_drop, 1e-9, 0.0, worst_drop <= 1e-9});
    const double budget = covertness_budget(cfg.epsilon);
    checks.push_back({"tightness", "relaxed_slack", std::abs(sol.relaxed_slack), 1e-3 * budget, 0.0,
                      std::abs(sol.relaxed_slack) <= 1e-3 * budget});
    if (sol.feasible()) {
        const DetectionEstimate det = detection_error_mc(sys, sol.theta_star, cfg.trials, cfg.seed);
        const double bound = 1.0 - cfg.epsilon - 3.0 * det.std_error;
        checks.push_back({"pinsker", "total_error", det.total_error, bound, det.std_error, det.total_error >= bound});
    } else {
        checks.push_back({"pinsker", "infeasible", std::nan(""), 1.0 - cfg.epsilon, 0.0, false});
    }

    std::string text = "suite,case,value,bound,std_error,pass\n";
    bool all = true;
    for (const auto& c : checks) {
        text += c.suite + ',' + c.label + ',' + num(c.value) + ',' + num(c.bound) + ',' + num(c.std_error) + ',' +
                (c.pass ? "true" : "false") + '\n';
        all = all && c.pass;
    }
    write_output(out_path, text, out);
    return all ? kExitOk : kExitError;
}

} // namespace

SystemConfig RunConfig::system() const {
    return SystemConfig::from_codebooks(n, L_a, L_b, backoff_db, db_to_linear(kappa_b_db), db_to_linear(kappa_w_db),
                                        rho.value_or(1.0 / L_a));
}

void RunConfig::set(std::string_view key, std::string_view value) {
    using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;
    static const std::map<std::string, Setter, std::less<>> setters{
        {"n", [](RunConfig& c, auto k, auto v) { c.n = parse_int<int>(k, v); }},
        {"L_a", [](RunConfig& c, auto k, auto v) { c.L_a = parse_int<int>(k, v); }},
        {"L_b", [](RunConfig& c, auto k, auto v) { c.L_b = parse_int<int>(k, v); }},
        {"backoff_db", [](RunConfig& c, auto k, auto v) { c.backoff_db = parse_double(k, v); }},
        {"kappa_b_db", [](RunConfig& c, auto k, auto v) { c.kappa_b_db = parse_double(k, v); }},
        {"kappa_w_db", [](RunConfig& c, auto k, auto v) { c.kappa_w_db = parse_double(k, v); }},
        {"rho", [](RunConfig& c, auto k, auto v) { c.rho = parse_double(k, v); }},
        {"epsilon", [](RunConfig& c, auto k, auto v) { c.epsilon = parse_double(k, v); }},
        {"seed", [](RunConfig& c, auto k, auto v) { c.seed = parse_int<std::uint64_t>(k, v); }},
        {"trials", [](RunConfig& c, auto k, auto v) { c.trials = parse_int<std::uint64_t>(k, v); }},
        {"validate_points", [](RunConfig& c, auto k, auto v) { c.validate_points = parse_int<int>(k, v); }},
        {"tau_a", [](RunConfig& c, auto k, auto v) { c.solver.tau_a = parse_double(k, v); }},
        {"tau_b", [](RunConfig& c, auto k, auto v) { c.solver.tau_b = parse_double(k, v); }},
        {"tau_c", [](RunConfig& c, auto k, auto v) { c.solver.tau_c = parse_double(k, v); }},
        {"eta0", [](RunConfig& c, auto k, auto v) { c.solver.eta0 = parse_double(k, v); }},
        {"nu0", [](RunConfig& c, auto k, auto v) { c.solver.nu0 = parse_double(k, v); }},
        {"max_outer", [](RunConfig& c, auto k, auto v) { c.solver.max_outer = parse_int<int>(k, v); }},
        {"inner_cycles", [](RunConfig& c, auto k, auto v) { c.solver.inner_cycles = parse_int<int>(k, v); }},
        {"inner_tol", [](RunConfig& c, auto k, auto v) { c.solver.inner_tol = parse_double(k, v); }},
        {"tol_obj", [](RunConfig& c, auto k, auto v) { c.solver.tol_obj = parse_double(k, v); }},
        {"tol_slack", [](RunConfig& c, auto k, auto v) { c.solver.tol_slack = parse_double(k, v); }},
        {"fd_step", [](RunConfig& c, auto k, auto v) { c.solver.fd_step = parse_double(k, v); }},
        {"p_min", [](RunConfig& c, auto k, auto v) { c.solver.p_min = parse_double(k, v); }},
        {"p_max", [](RunConfig& c, auto k, auto v) { c.solver.p_max = parse_double(k, v); }},
        {"max_backtracks", [](RunConfig& c, auto k, auto v) { c.solver.max_backtracks = parse_int<int>(k, v); }},
        {"grid_pa_points", [](RunConfig& c, auto k, auto v) { c.grid.pa_points = parse_int<int>(k, v); }},
        {"grid_pd_points", [](RunConfig& c, auto k, auto v) { c.grid.pd_points = parse_int<int>(k, v); }},
        {"grid_p_lo", [](RunConfig& c, auto k, auto v) { c.grid.p_lo = parse_double(k, v); }},
        {"grid_p_hi", [](RunConfig& c, auto k, auto v) { c.grid.p_hi = parse_double(k, v); }},
        {"grid_np_min", [](RunConfig& c, auto k, auto v) { c.grid.np_min = parse_int<int>(k, v); }},
        {"grid_np_max", [](RunConfig& c, auto k, auto v) { c.grid.np_max = parse_int<int>(k, v); }},
        {"grid_zero_power", [](RunConfig& c, auto k, auto v) { c.grid.include_zero_power = parse_bool(k, v); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    it->second(*this, key, value);
}

void apply_config(RunConfig& cfg, std::istream& in, const std::string& source) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        const std::string where = source + ':' + std::to_string(number) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
        const auto key = trim(text.substr(0, eq));
        if (key.empty()) throw ConfigError(where + "missing key before '='");
        try {
            cfg.set(key, text.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig cfg;
    apply_config(cfg, file, path);
    return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
    }
    cfg.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::vector<double> parse_values(std::string_view text) {
    text = trim(text);
    std::vector<double> values;
    if (text.find(':') != std::string_view::npos) {
        const auto first = text.find(':');
        const auto second = text.find(':', first + 1);
        if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
            throw ConfigError("range must be start:step:stop, got '" + std::string(text) + "'");
        }
        const double start = parse_double("range start", text.substr(0, first));
        const double step = parse_double("range step", text.substr(first + 1, second - first - 1));
        const double stop = parse_double("range stop", text.substr(second + 1));
        if (step == 0.0 || (stop - start) / step < 0.0) {
            throw ConfigError("range '" + std::string(text) + "' does not reach its stop value");
        }
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 100000) throw ConfigError("range '" + std::string(text) + "' has too many points");
        for (long i = 0; i < count; ++i) values.push_back(tidy(start + static_cast<double>(i) * step));
        return values;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        values.push_back(parse_double("sweep value", item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return values;
}

SweepSpec parse_sweep(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("sweep expects key=values, got '" + std::string(text) + "'");
    }
    SweepSpec spec{std::string(trim(text.substr(0, eq))), parse_values(text.substr(eq + 1))};
    if (spec.key != "epsilon" && spec.key != "kappa_w_db" && spec.key != "L_a") {
        throw ConfigError("sweep key must be epsilon, kappa_w_db or L_a, got '" + spec.key + "'");
    }
    if (spec.key == "L_a") {
        for (double v : spec.values) {
            if (v != std::floor(v)) throw ConfigError("L_a sweep values must be integers, got " + num(v));
        }
    }
    return spec;
}

std::string solution_row(const RunConfig& cfg, const Solution& sol, std::optional<double> t_mc) {
    const DesignPoint& t = sol.theta_star;
    return common_prefix(cfg) + ',' + num(t.P_a) + ',' + num(t.P_d) + ',' + num(t.n_p) + ',' +
           (sol.feasible() ? num(sol.t_lb_star) : std::string()) + ',' + (t_mc ? num(*t_mc) : std::string()) + ',' +
           num(sol.kl_total) + ',' + num(sol.slack) + ',' + num(sol.nu_star) + ',' + std::to_string(sol.outer_iters) +
           ',' + std::string(to_string(sol.status));
}

std::string oracle_row(const RunConfig& cfg, const OracleResult& res, std::optional<double> t_mc) {
    if (!res.feasible) return common_prefix(cfg) + ",,,,,,,,,,infeasible";
    const SystemConfig sys = cfg.system();
    const KlBreakdown kl = kl_divergence(sys, res.best);
    return common_prefix(cfg) + ',' + num(res.best.P_a) + ',' + num(res.best.P_d) + ',' + num(res.best.n_p) + ',' +
           num(res.t_lb) + ',' + (t_mc ? num(*t_mc) : std::string()) + ',' + num(kl.total) + ',' +
           num(kl.total - covertness_budget(cfg.epsilon)) + ",,," + "grid_optimum";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint beam training and covert data transmission design"};
    app.require_subcommand(1);
    Options opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "flat key = value configuration file");
        sub->add_option("--out", opts.out, "write CSV here instead of stdout");
        sub->add_option("--seed", opts.seed, "Monte-Carlo seed");
        sub->add_option("--trials", opts.trials, "Monte-Carlo trials (0 skips the t_mc column)");
        sub->add_option("--set", opts.overrides, "key=value override, repeatable");
    };
    auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
    auto* sweep_cmd = app.add_subcommand("sweep", "solve over epsilon, kappa_w_db or L_a");
    auto* validate_cmd = app.add_subcommand("validate", "bound dominance, monotonicity, tightness and detection checks");
    auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive grid search");
    auto* trace_cmd = app.add_subcommand("trace", "per-iteration solver trace");
    for (auto* sub : {solve_cmd, sweep_cmd, validate_cmd, oracle_cmd, trace_cmd}) add_common(sub);
    std::string sweep_text;
    sweep_cmd->add_option("spec", sweep_text, "key=start:step:stop or key=v1,v2,...")->required();
    std::optional<int> points;
    validate_cmd->add_option("--points", points, "random points for the dominance suite");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        RunConfig cfg = resolve(opts);
        if (points) cfg.validate_points = *points;
        if (cfg.validate_points < 1) throw ConfigError("validate_points must be at least 1");
        if (*solve_cmd) return cmd_solve(cfg, opts.out, out);
        if (*sweep_cmd) return cmd_sweep(cfg, parse_sweep(sweep_text), opts.out, out);
        if (*validate_cmd) return cmd_validate(cfg, opts.out, out);
        if (*oracle_cmd) return cmd_oracle(cfg, opts.out, out);
        return cmd_trace(cfg, opts.out, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace covertbeam::cli
