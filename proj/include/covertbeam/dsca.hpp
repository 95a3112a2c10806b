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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "covertbeam/model.hpp"

// Dual-decomposition successive convex approximation.
//
// The covertness constraint KL(theta) <= 2 eps^2 is priced by a multiplier nu
// updated with projected subgradient steps. For a fixed nu the partial
// Lagrangian
//
//     L(theta, nu) = f(theta) - nu (KL(theta) - 2 eps^2)
//
// is raised by one cycle of block updates over P_a, n_p and P_d. Each block
// keeps its concave part g_c exactly, linearizes the rest g_n at the current
// point and adds a proximal term, giving the strongly concave surrogate
//
//     g_c(x) + Gamma (x - x_t) - tau (x - x_t)^2,     Gamma = g_n'(x_t),
//
// maximized over the block's box. A surrogate step that would lower L is
// retried with a larger tau (a shorter step) and ultimately rejected, so L
// never decreases within a dual iterate. The relaxed n_p is rounded at the end.
namespace covertbeam {

struct SolverOptions {
    /// Proximal weights relative to the block scale: the effective weight is
    /// tau / max(x_t, floor)^2, which makes the proximal term unit-free.
    double tau_a = 1e-3;
    double tau_b = 1e-3;
    double tau_c = 1e-3;
    /// Initial dual step and multiplier. Unset values come from a pilot search
    /// on a scratch copy of the start point: nu0 is the multiplier whose primal
    /// response meets the budget and eta0 is the inverse secant slope of the
    /// slack with respect to nu there.
    std::optional<double> eta0;
    std::optional<double> nu0;
    int max_outer = 100;
    /// Block cycles per dual iterate; cycling stops early once a full cycle
    /// raises L by no more than inner_tol * max(1, |L|).
    int inner_cycles = 5;
    double inner_tol = 1e-6;
    double tol_obj = 1e-4;
    /// Convergence also requires |KL - 2 eps^2| <= tol_slack * 2 eps^2
    /// (or nu = 0 with the constraint inactive).
    double tol_slack = 5e-4;
    double fd_step = 1e-5;
    double p_min = 1e-8;
    double p_max = 1e4;
    /// Proximal-weight escalations (x4 each) tried before a block step is rejected.
    int max_backtracks = 40;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Memo of p_lb evaluations keyed on the exact (P_a, n_p) pair.
class AlignmentCache {
public:
    double p_lb(const SystemConfig& cfg, double P_a, double n_p);
    std::size_t size() const noexcept { return values_.size(); }

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<double, double>& k) const noexcept;
    };
    std::unordered_map<std::pair<double, double>, double, KeyHash> values_;
};

struct SolverState {
    DesignPoint theta;
    double nu = 0.0;
    int iter = 0;
    double epsilon = 0.0;
    /// Current proximal multipliers (>= 1) for the P_a, n_p, P_d blocks.
    std::array<double, 3> prox_multiplier{1.0, 1.0, 1.0};
    std::vector<double> lagrangian_trace;  ///< L after every block update
    std::vector<double> slack_trace;       ///< KL slack after every outer iteration
    AlignmentCache cache;
};

/// Outcome of one block update.
struct BlockUpdate {
    double value = 0.0;              ///< new block value (previous one if rejected)
    double lagrangian_before = 0.0;
    double lagrangian_after = 0.0;
    int backtracks = 0;
    bool rejected = false;
};

struct TraceRow {
    int iter = 0;
    double nu = 0.0;
    DesignPoint theta;
    double lagrangian = 0.0;
    double objective = 0.0;
    double kl_slack = 0.0;
    /// L before the first block cycle, then after every P_a, n_p and P_d update.
    std::vector<double> block_lagrangian;
    int rejected_blocks = 0;
};

enum class SolveStatus { converged, max_iterations, infeasible };

std::string_view to_string(SolveStatus status);

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    DesignPoint theta_relaxed;
    DesignPoint theta_star;      ///< integer n_p
    double t_lb_star = 0.0;      ///< bits/symbol at theta_star
    double p_lb_star = 0.0;
    double kl_total = 0.0;       ///< nats at theta_star
    double slack = 0.0;          ///< at theta_star
    double relaxed_slack = 0.0;  ///< at theta_relaxed
    double nu_star = 0.0;
    int outer_iters = 0;
    double rounding_delta = 0.0;
    bool rounding_repaired = false;
    std::vector<TraceRow> trace;

    bool feasible() const noexcept { return status != SolveStatus::infeasible; }
};

/// Partial Lagrangian f - nu (KL - 2 eps^2) given a precomputed p_lb.
double lagrangian(const SystemConfig& cfg, const DesignPoint& theta, double nu, double epsilon, double plb);
double lagrangian(SolverState& state, const SystemConfig& cfg, const DesignPoint& theta);

/// max(0, nu + eta_t slack) with eta_t = eta0 / sqrt(t + 1).
double dual_update(double nu, double slack, int t, const SolverOptions& opts);

struct ConcavePart {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// Maximizer over [lo, hi] of g_c(x) + gamma (x - x_t) - tau (x - x_t)^2,
/// by bisection on the strictly decreasing derivative.
double maximize_surrogate_1d(const ConcavePart& g_c, double gamma, double tau, double x_t, double lo, double hi);

/// Surrogate value itself, for tangency checks.
double surrogate_value(const ConcavePart& g_c, double gamma, double tau, double x_t, double x);

/// Central difference with step fd_step * max(1, |x|), shrunk when needed so
/// that x - h stays at or above domain_lo.
double gradient_nonconcave(const std::function<double(double)>& g_n, double x, const SolverOptions& opts,
                           double domain_lo = -std::numeric_limits<double>::infinity());

BlockUpdate update_pa(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts);
BlockUpdate update_np(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts);
BlockUpdate update_pd(SolverState& state, const SystemConfig& cfg, const SolverOptions& opts);

struct RoundingResult {
    DesignPoint theta;
    bool feasible = false;
    bool repaired = false;  ///< powers were lowered to restore covertness
    double delta = 0.0;     ///< threshold on frac(n_p) implied by the choice
};

/// Integer n_p from the relaxed solution: keep the covert neighbour with the
/// larger t_lb; if neither is covert, lower P_d (then P_a) at the neighbour
/// with the smaller KL until the constraint holds.
RoundingResult round_np(const DesignPoint& theta_relaxed, const SystemConfig& cfg, double epsilon,
                        const SolverOptions& opts = {});

/// Starting point: n_p = max(1, n_p_max / 2) and P_a = P_d = P0 with KL = eps^2.
/// Empty when no power in the box meets the covertness budget.
std::optional<DesignPoint> initial_point(const SystemConfig& cfg, double epsilon, const SolverOptions& opts);

Solution solve(const SystemConfig& cfg, double epsilon, const SolverOptions& opts = {});

} // namespace covertbeam
