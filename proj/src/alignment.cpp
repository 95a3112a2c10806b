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

#include "covertbeam/alignment.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "covertbeam/errors.hpp"
#include "covertbeam/parallel.hpp"
#include "covertbeam/rng.hpp"
#include "covertbeam/specfun.hpp"

namespace covertbeam {

namespace {

double miss_term(double lambda_A, double lambda_i, std::int64_t multiplicity, double rel_tol) {
    if (multiplicity == 0) return 0.0;
    const double m = static_cast<double>(multiplicity);
    auto integrand = [&](double t) {
        const double log_f = specfun::chi2nc_log_pdf(t, lambda_A);
        const double log_F = specfun::chi2nc_log_cdf(t, lambda_i);
        return -std::expm1(m * log_F) * std::exp(log_f);
    };
    return specfun::integrate_semi_infinite(integrand, lambda_A, rel_tol);
}

} // namespace

MissBreakdown miss_probabilities(const SystemConfig& cfg, double P_a, double n_p, double rel_tol) {
    if (!(P_a >= 0.0)) throw DomainError("p_lb: training power must be nonnegative");
    if (!(n_p > 0.0)) throw DomainError("p_lb: n_p must be positive");
    const Noncentralities nc = noncentralities(cfg, P_a, n_p);
    return {miss_term(nc.lambda_A, nc.lambda_B, nc.m_B, rel_tol),
            miss_term(nc.lambda_A, nc.lambda_C, nc.m_C, rel_tol),
            miss_term(nc.lambda_A, nc.lambda_D, nc.m_D, rel_tol)};
}

double p_lb(const SystemConfig& cfg, double P_a, double n_p) {
    return 1.0 - miss_probabilities(cfg, P_a, n_p).total();
}

McEstimate p_align_mc(const SystemConfig& cfg, double P_a, double n_p, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw DomainError("p_align_mc: trials must be at least 1");
    const Noncentralities nc = noncentralities(cfg, P_a, n_p);
    struct Group {
        double amplitude;
        std::int64_t count;
    };
    const std::array<Group, 3> competitors{Group{std::sqrt(nc.lambda_B), nc.m_B},
                                           Group{std::sqrt(nc.lambda_C), nc.m_C},
                                           Group{std::sqrt(nc.lambda_D), nc.m_D}};
    const double aligned_amplitude = std::sqrt(nc.lambda_A);

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> successes(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(trials, begin + kChunk);
        std::uint64_t hits = 0;
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            TrialStream rng(seed, trial);
            auto draw = [&rng](double amplitude) {
                const double re = amplitude + rng.normal();
                const double im = rng.normal();
                return re * re + im * im;
            };
            const double aligned = draw(aligned_amplitude);
            bool won = true;
            for (const auto& group : competitors) {
                for (std::int64_t k = 0; k < group.count && won; ++k) {
                    if (draw(group.amplitude) >= aligned) won = false;
                }
                if (!won) break;
            }
            hits += won ? 1 : 0;
        }
        successes[c] = hits;
    });

    std::uint64_t total = 0;
    for (auto s : successes) total += s;
    const double p = static_cast<double>(total) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

} // namespace covertbeam
