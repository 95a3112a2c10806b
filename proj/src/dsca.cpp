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

#include "covertbeam/dsca.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "covertbeam/alignment.hpp"
#include "covertbeam/covertness.hpp"
#include "covertbeam/errors.hpp"
#include "covertbeam/throughput.hpp"

namespace covertbeam {

namespace {

enum Block : int { kTrainingPower = 0, kTrainingLength = 1, kDataPower = 2 };

// Multiplier at which the P_d block is stationary for the Lagrangian:
// d f / d P_d = nu d KL / d P_d.
double balancing_multiplier(const SystemConfig& cfg, const DesignPoint& theta) {
    const double c = cfg.aligned_snr_gain();
    const double rate_nats = std::log1p(c * theta.P_d);
    const double df = c / ((1.0 + c * theta.P_d) * rate_nats);
    const double a3 = cfg.kappa_w * willie_average_gain(cfg);
    const double xi3 = a3 * theta.P_d;
    const double dkl = (cfg.n - theta.n_p * cfg.L()) * a3 * xi3 / ((1.0 + xi3) * (1.0 + xi3));
    if (!(dkl > 0.0) || !std::isfinite(df)) return 1.0;
    return df / dkl;
}

// Pilot search limits for the automatic nu0 / eta0.
constexpr int kPilotCycles = 20;
constexpr int kPilotBracket = 8;
constexpr int kPilotRefine = 8;
constexpr double kPilotSlack = 0.05;

// Start point with P_d raised until the data-phase term alone spends the
// budget; the multiplier is estimated there.
DesignPoint budget_data_point(const SystemConfig& cfg, DesignPoint theta, double budget, const SolverOptions& opts) {
    const double a3 = cfg.kappa_w * willie_average_gain(cfg);
    const double symbols = cfg.n - theta.n_p * cfg.L();
    auto dt_term = [&](double p) { return symbols * per_symbol_kl(a3 * p); };
    if (dt_term(opts.p_max) <= budget) {
        theta.P_d = opts.p_max;
        return theta;
    }
    double log_lo = std::log(opts.p_min);
    double log_hi = std::log(opts.p_max);
    for (int iter = 0; iter < 200 && log_hi - log_lo > 1e-12; ++iter) {
        const double mid = 0.5 * (log_lo + log_hi);
        (dt_term(std::exp(mid)) < budget ? log_lo : log_hi) = mid;
    }
    theta.P_d = std::exp(0.5 * (log_lo + log_hi));
    return theta;
}

void block_cycles(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts, int cycles) {
    double value = lagrangian(state, cfg, state.theta);
    for (int cycle = 0; cycle < cycles; ++cycle) {
        update_pa(state, cfg, opts);
        update_np(state, cfg, opts);
        const double after = update_pd(state, cfg, opts).lagrangian_after;
        if (after - value <= opts.inner_tol * std::max(1.0, std::abs(after))) break;
        value = after;
    }
}

struct DualEstimate {
    double nu;
    double step;
};

// Pilot search for the multiplier at which the primal response meets the
// budget, run on a scratch copy of the state. Returns that multiplier and the
// inverse secant slope of slack(nu) as the dual step.
DualEstimate estimate_dual(const SystemConfig& cfg, double epsilon, const DesignPoint& start,
                           const SolverOptions& opts) {
    const double budget = covertness_budget(epsilon);
    const double nu_balance = balancing_multiplier(cfg, budget_data_point(cfg, start, budget, opts));
    SolverState pilot;
    pilot.theta = start;
    pilot.epsilon = epsilon;
    auto response = [&](double nu) {
        pilot.nu = nu;
        block_cycles(pilot, cfg, opts, kPilotCycles);
        return covertness_slack(cfg, pilot.theta, epsilon);
    };

    double lo = nu_balance;  // slack(lo) > 0 once bracketed
    double hi = nu_balance;  // slack(hi) <= 0 once bracketed
    double s_lo = response(lo);
    double s_hi = s_lo;
    for (int k = 0; k < kPilotBracket && s_lo <= 0.0; ++k) {
        hi = lo;
        s_hi = s_lo;
        lo /= 4.0;
        s_lo = response(lo);
    }
    for (int k = 0; k < kPilotBracket && s_hi > 0.0; ++k) {
        lo = hi;
        s_lo = s_hi;
        hi *= 4.0;
        s_hi = response(hi);
    }
    if (!(s_lo > 0.0 && s_hi <= 0.0) || lo == hi) return {nu_balance, nu_balance / budget};

    for (int k = 0; k < kPilotRefine; ++k) {
        const double mid = std::sqrt(lo * hi);
        const double s = response(mid);
        (s > 0.0 ? lo : hi) = mid;
        (s > 0.0 ? s_lo : s_hi) = s;
        if (std::abs(s) <= kPilotSlack * budget) break;
    }
    const double nu = std::abs(s_lo) < std::abs(s_hi) ? lo : hi;
    // Capped so that the first dual step from the half-budget start at most
    // halves the multiplier.
    const double step = std::min((hi - lo) / (s_lo - s_hi), nu / budget);
    return {nu, step};
}

// Runs the surrogate step for one block, escalating the proximal weight until
// the Lagrangian does not decrease.
template <typename Assign>
BlockUpdate apply_block(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts, Block block,
                        double tau_rel, const ConcavePart& g_c, double gamma, double x_t, double lo, double hi,
                        double scale, Assign assign) {
    BlockUpdate out;
    out.lagrangian_before = lagrangian(state, cfg, state.theta);
    double& multiplier = state.prox_multiplier[block];
    const double start_multiplier = multiplier;
    const double base_tau = tau_rel / (scale * scale);
    for (int k = 0; k <= opts.max_backtracks; ++k) {
        const double x = maximize_surrogate_1d(g_c, gamma, base_tau * multiplier, x_t, lo, hi);
        DesignPoint candidate = state.theta;
        assign(candidate, x);
        const double value = lagrangian(state, cfg, candidate);
        if (value >= out.lagrangian_before) {
            state.theta = candidate;
            out.value = x;
            out.lagrangian_after = value;
            out.backtracks = k;
            multiplier = std::max(1.0, multiplier / 4.0);
            state.lagrangian_trace.push_back(value);
            return out;
        }
        multiplier *= 4.0;
    }
    multiplier = start_multiplier;
    out.value = x_t;
    out.lagrangian_after = out.lagrangian_before;
    out.backtracks = opts.max_backtracks;
    out.rejected = true;
    state.lagrangian_trace.push_back(out.lagrangian_after);
    return out;
}

double log_clamped_plb(AlignmentCache& cache, const SystemConfig& cfg, double P_a, double n_p) {
    return std::log(std::clamp(cache.p_lb(cfg, P_a, n_p), kPlbFloor, 1.0));
}

// Largest value in [lo, hi] (log-scale bisection) for which the constraint
// holds, given that it holds at lo and fails at hi.
template <typename Assign>
double largest_covert(const SystemConfig& cfg, DesignPoint theta, double epsilon, double lo, double hi,
                      Assign assign) {
    double log_lo = std::log(lo);
    double log_hi = std::log(hi);
    for (int iter = 0; iter < 200 && log_hi - log_lo > 1e-13; ++iter) {
        const double mid = 0.5 * (log_lo + log_hi);
        assign(theta, std::exp(mid));
        (covertness_slack(cfg, theta, epsilon) <= 0.0 ? log_lo : log_hi) = mid;
    }
    return std::exp(log_lo);
}

} // namespace

void SolverOptions::validate() const {
    if (inner_cycles < 1) throw ConfigError("inner_cycles must be at least 1");
    if (!(inner_tol >= 0.0)) throw ConfigError("inner_tol must be nonnegative");
    if (!(tau_a > 0.0 && tau_b > 0.0 && tau_c > 0.0)) throw ConfigError("proximal weights must be positive");
    if (eta0 && !(*eta0 > 0.0)) throw ConfigError("eta0 must be positive");
    if (nu0 && !(*nu0 >= 0.0)) throw ConfigError("nu0 must be nonnegative");
    if (max_outer < 1) throw ConfigError("max_outer must be at least 1");
    if (!(tol_obj > 0.0 && tol_obj < 1.0)) throw ConfigError("tol_obj must lie in (0, 1)");
    if (!(tol_slack > 0.0)) throw ConfigError("tol_slack must be positive");
    if (!(fd_step > 0.0)) throw ConfigError("fd_step must be positive");
    if (!(p_min > 0.0 && p_max > p_min)) throw ConfigError("power box requires 0 < p_min < p_max");
    if (max_backtracks < 0) throw ConfigError("max_backtracks must be nonnegative");
}

std::size_t AlignmentCache::KeyHash::operator()(const std::pair<double, double>& k) const noexcept {
    const auto a = std::bit_cast<std::uint64_t>(k.first);
    const auto b = std::bit_cast<std::uint64_t>(k.second);
    return std::hash<std::uint64_t>{}(a ^ (b * 0x9E3779B97F4A7C15ull + 0x7F4A7C15ull));
}

double AlignmentCache::p_lb(const SystemConfig& cfg, double P_a, double n_p) {
    const std::pair key{P_a, n_p};
    if (auto it = values_.find(key); it != values_.end()) return it->second;
    const double value = covertbeam::p_lb(cfg, P_a, n_p);
    values_.emplace(key, value);
    return value;
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

double lagrangian(const SystemConfig& cfg, const DesignPoint& theta, double nu, double epsilon, double plb) {
    return objective_f(cfg, theta, plb) - nu * covertness_slack(cfg, theta, epsilon);
}

double lagrangian(SolverState& state, const SystemConfig& cfg, const DesignPoint& theta) {
    return lagrangian(cfg, theta, state.nu, state.epsilon, state.cache.p_lb(cfg, theta.P_a, theta.n_p));
}

double dual_update(double nu, double slack, int t, const SolverOptions& opts) {
    if (!(nu >= 0.0)) throw DomainError("dual_update: nu must be nonnegative");
    if (!opts.eta0) throw ConfigError("dual_update: eta0 is not set");
    const double step = *opts.eta0 / std::sqrt(static_cast<double>(t) + 1.0);
    return std::max(0.0, nu + step * slack);
}

double surrogate_value(const ConcavePart& g_c, double gamma, double tau, double x_t, double x) {
    const double dx = x - x_t;
    return g_c.value(x) + gamma * dx - tau * dx * dx;
}

double maximize_surrogate_1d(const ConcavePart& g_c, double gamma, double tau, double x_t, double lo, double hi) {
    if (!(tau > 0.0)) throw DomainError("maximize_surrogate_1d: tau must be positive");
    if (!(lo < hi)) throw DomainError("maximize_surrogate_1d: empty box");
    auto slope = [&](double x) { return g_c.derivative(x) + gamma - 2.0 * tau * (x - x_t); };
    const double tol = 1e-10 * (1.0 + std::abs(gamma));
    if (slope(lo) <= 0.0) return lo;
    if (slope(hi) >= 0.0) return hi;
    double a = lo;
    double b = hi;
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double s = slope(mid);
        if (std::abs(s) <= tol) return mid;
        (s > 0.0 ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

double gradient_nonconcave(const std::function<double(double)>& g_n, double x, const SolverOptions& opts,
                           double domain_lo) {
    double h = opts.fd_step * std::max(1.0, std::abs(x));
    if (x - h < domain_lo) h = 0.5 * (x - domain_lo);
    if (!(h > 0.0)) throw DomainError("gradient_nonconcave: x sits on the domain boundary");
    const double up = g_n(x + h);
    const double down = g_n(x - h);
    if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError("gradient_nonconcave: non-finite function value near x=" + std::to_string(x),
                             std::isfinite(up) ? up : down);
    }
    return (up - down) / (2.0 * h);
}

BlockUpdate update_pa(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts) {
    const DesignPoint theta = state.theta;
    const double nu = state.nu;
    const double main_weight = nu * cfg.L_b * theta.n_p;
    const double side_weight = nu * cfg.L_b * (cfg.L_a - 1) * theta.n_p;
    const double main_gain = cfg.kappa_w * cfg.gains.W_a;
    const double side_gain = cfg.kappa_w * cfg.gains.w_a;

    // g_c = nu L_b n_p [xi1/(1+xi1) + (L_a-1) xi2/(1+xi2)]
    ConcavePart g_c{
        [=](double x) {
            return main_weight * main_gain * x / (1.0 + main_gain * x) +
                   side_weight * side_gain * x / (1.0 + side_gain * x);
        },
        [=](double x) {
            const double u = 1.0 + main_gain * x;
            const double v = 1.0 + side_gain * x;
            return main_weight * main_gain / (u * u) + side_weight * side_gain / (v * v);
        }};
    // g_n = ln p_lb - nu L_b n_p [ln(1+xi1) + (L_a-1) ln(1+xi2)]; only ln p_lb is differenced.
    auto log_alignment = [&](double x) { return log_clamped_plb(state.cache, cfg, x, theta.n_p); };
    const double x_t = theta.P_a;
    const double gamma = gradient_nonconcave(log_alignment, x_t, opts, 0.0) -
                         main_weight * main_gain / (1.0 + main_gain * x_t) -
                         side_weight * side_gain / (1.0 + side_gain * x_t);
    return apply_block(state, cfg, opts, kTrainingPower, opts.tau_a, g_c, gamma, x_t, opts.p_min, opts.p_max,
                       std::max(x_t, opts.p_min), [](DesignPoint& p, double x) { p.P_a = x; });
}

BlockUpdate update_np(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts) {
    const DesignPoint theta = state.theta;
    const KlBreakdown kl = kl_divergence(cfg, theta);
    // KL is affine in n_p at fixed powers; this is its slope.
    const double kl_slope = cfg.L_b * per_symbol_kl(kl.xi1) + cfg.L_b * (cfg.L_a - 1) * per_symbol_kl(kl.xi2) -
                            cfg.L() * per_symbol_kl(kl.xi3);
    const double price = state.nu * kl_slope;
    const double ratio = static_cast<double>(cfg.L()) / cfg.n;

    // g_c = -nu n_p (KL slope) + ln(1 - n_p L / n)
    ConcavePart g_c{[=](double x) { return -price * x + std::log1p(-ratio * x); },
                    [=](double x) { return -price - ratio / (1.0 - ratio * x); }};
    auto log_alignment = [&](double x) { return log_clamped_plb(state.cache, cfg, theta.P_a, x); };
    const double x_t = theta.n_p;
    const double gamma = gradient_nonconcave(log_alignment, x_t, opts, 0.0);
    return apply_block(state, cfg, opts, kTrainingLength, opts.tau_b, g_c, gamma, x_t, 1.0, cfg.np_max(),
                       std::max(x_t, 1.0), [](DesignPoint& p, double x) { p.n_p = x; });
}

BlockUpdate update_pd(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts) {
    const DesignPoint theta = state.theta;
    const double snr_gain = cfg.aligned_snr_gain();
    const double weight = state.nu * (cfg.n - theta.n_p * cfg.L());
    const double gain = cfg.kappa_w * willie_average_gain(cfg);

    // g_c = ln ln(1 + P_d kappa_b W_a F_b) + nu (n - n_a) xi3/(1+xi3)
    ConcavePart g_c{
        [=](double x) { return std::log(std::log1p(snr_gain * x)) + weight * gain * x / (1.0 + gain * x); },
        [=](double x) {
            const double u = 1.0 + gain * x;
            return snr_gain / ((1.0 + snr_gain * x) * std::log1p(snr_gain * x)) + weight * gain / (u * u);
        }};
    // g_n = -nu (n - n_a) ln(1 + xi3), differentiated in closed form.
    const double x_t = theta.P_d;
    const double gamma = -weight * gain / (1.0 + gain * x_t);
    return apply_block(state, cfg, opts, kDataPower, opts.tau_c, g_c, gamma, x_t, opts.p_min, opts.p_max,
                       std::max(x_t, opts.p_min), [](DesignPoint& p, double x) { p.P_d = x; });
}

RoundingResult round_np(const DesignPoint& theta_relaxed, const SystemConfig& cfg, double epsilon,
                        const SolverOptions& opts) {
    const double n_p = std::clamp(theta_relaxed.n_p, 1.0, cfg.np_max());
    const double below = std::floor(n_p);
    const double above = std::ceil(n_p);
    const double frac = n_p - below;

    std::vector<DesignPoint> candidates{{theta_relaxed.P_a, theta_relaxed.P_d, below}};
    if (above != below) candidates.push_back({theta_relaxed.P_a, theta_relaxed.P_d, above});

    RoundingResult out;
    auto implied_delta = [&](double chosen) { return chosen == below ? frac : 0.0; };

    double best_rate = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        if (covertness_slack(cfg, c, epsilon) > 0.0) continue;
        const double rate = t_lb(cfg, c);
        if (rate > best_rate) {
            best_rate = rate;
            out.theta = c;
            out.feasible = true;
        }
    }
    if (out.feasible) {
        out.delta = implied_delta(out.theta.n_p);
        return out;
    }

    // Neither neighbour is covert: repair the one with the smaller divergence.
    DesignPoint repair = candidates.front();
    for (const auto& c : candidates) {
        if (kl_divergence(cfg, c).total < kl_divergence(cfg, repair).total) repair = c;
    }
    out.repaired = true;
    out.delta = implied_delta(repair.n_p);

    DesignPoint floor_pd = repair;
    floor_pd.P_d = opts.p_min;
    if (covertness_slack(cfg, floor_pd, epsilon) <= 0.0) {
        repair.P_d = largest_covert(cfg, repair, epsilon, opts.p_min, std::max(repair.P_d, opts.p_min),
                                    [](DesignPoint& p, double x) { p.P_d = x; });
        out.theta = repair;
        out.feasible = true;
        return out;
    }
    repair.P_d = opts.p_min;
    DesignPoint floor_pa = repair;
    floor_pa.P_a = opts.p_min;
    if (covertness_slack(cfg, floor_pa, epsilon) <= 0.0) {
        repair.P_a = largest_covert(cfg, repair, epsilon, opts.p_min, std::max(repair.P_a, opts.p_min),
                                    [](DesignPoint& p, double x) { p.P_a = x; });
        out.theta = repair;
        out.feasible = true;
        return out;
    }
    out.theta = floor_pa;
    out.feasible = false;
    return out;
}

std::optional<DesignPoint> initial_point(const SystemConfig& cfg, double epsilon, const SolverOptions& opts) {
    const double n_p = std::max(1.0, cfg.np_max() / 2.0);
    const double target = 0.5 * covertness_budget(epsilon);
    auto kl_at = [&](double p) { return kl_divergence(cfg, {p, p, n_p}).total; };

    if (kl_at(opts.p_min) >= target) {
        if (kl_at(opts.p_min) <= covertness_budget(epsilon)) return DesignPoint{opts.p_min, opts.p_min, n_p};
        return std::nullopt;
    }
    if (kl_at(opts.p_max) <= target) return DesignPoint{opts.p_max, opts.p_max, n_p};
    double log_lo = std::log(opts.p_min);
    double log_hi = std::log(opts.p_max);
    for (int iter = 0; iter < 200 && log_hi - log_lo > 1e-14; ++iter) {
        const double mid = 0.5 * (log_lo + log_hi);
        (kl_at(std::exp(mid)) < target ? log_lo : log_hi) = mid;
    }
    const double p0 = std::exp(0.5 * (log_lo + log_hi));
    return DesignPoint{p0, p0, n_p};
}

Solution solve(const SystemConfig& cfg, double epsilon, const SolverOptions& opts_in) {
    cfg.validate();
    opts_in.validate();
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("solve: epsilon must lie in (0, 1)");

    Solution sol;
    const auto start = initial_point(cfg, epsilon, opts_in);
    if (!start) return sol;

    const double budget = covertness_budget(epsilon);
    SolverOptions opts = opts_in;
    SolverState state;
    state.theta = *start;
    state.epsilon = epsilon;
    if (!opts.nu0 || !opts.eta0) {
        const DualEstimate guess = estimate_dual(cfg, epsilon, *start, opts);
        if (!opts.nu0) opts.nu0 = guess.nu;
        if (!opts.eta0) opts.eta0 = guess.step;
    }
    state.nu = *opts.nu0;

    double previous = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    int t = 0;
    while (t < opts.max_outer && !converged) {
        state.iter = t;
        state.nu = dual_update(state.nu, covertness_slack(cfg, state.theta, epsilon), t, opts);

        TraceRow row;
        row.iter = t + 1;
        row.nu = state.nu;
        row.block_lagrangian.push_back(lagrangian(state, cfg, state.theta));
        for (int cycle = 0; cycle < opts.inner_cycles; ++cycle) {
            const double before = row.block_lagrangian.back();
            for (auto update : {update_pa, update_np, update_pd}) {
                const BlockUpdate step = update(state, cfg, opts);
                row.block_lagrangian.push_back(step.lagrangian_after);
                row.rejected_blocks += int(step.rejected);
            }
            const double after = row.block_lagrangian.back();
            if (after - before <= opts.inner_tol * std::max(1.0, std::abs(after))) break;
        }
        row.theta = state.theta;
        row.lagrangian = row.block_lagrangian.back();
        row.objective = objective_f(cfg, state.theta, state.cache.p_lb(cfg, state.theta.P_a, state.theta.n_p));
        row.kl_slack = covertness_slack(cfg, state.theta, epsilon);
        state.slack_trace.push_back(row.kl_slack);
        sol.trace.push_back(row);

        const bool tight = std::abs(row.kl_slack) <= opts.tol_slack * budget ||
                           (state.nu == 0.0 && row.kl_slack <= 0.0);
        const bool flat = std::abs(row.lagrangian - previous) <= opts.tol_obj * std::max(1.0, std::abs(row.lagrangian));
        converged = t > 0 && flat && tight;
        previous = row.lagrangian;
        ++t;
    }

    sol.outer_iters = t;
    sol.nu_star = state.nu;
    sol.theta_relaxed = state.theta;
    sol.relaxed_slack = covertness_slack(cfg, state.theta, epsilon);

    const RoundingResult rounded = round_np(state.theta, cfg, epsilon, opts);
    sol.theta_star = rounded.theta;
    sol.rounding_delta = rounded.delta;
    sol.rounding_repaired = rounded.repaired;
    sol.kl_total = kl_divergence(cfg, rounded.theta).total;
    sol.slack = sol.kl_total - budget;
    if (!rounded.feasible) {
        sol.status = SolveStatus::infeasible;
        return sol;
    }
    sol.p_lb_star = state.cache.p_lb(cfg, rounded.theta.P_a, rounded.theta.n_p);
    sol.t_lb_star = t_lb(cfg, rounded.theta, sol.p_lb_star);
    sol.status = converged ? SolveStatus::converged : SolveStatus::max_iterations;
    return sol;
}

} // namespace covertbeam
