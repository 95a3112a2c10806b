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

#include <cstdint>

#include "covertbeam/alignment.hpp"
#include "covertbeam/model.hpp"

namespace covertbeam {

/// Floor applied to p_lb before taking its logarithm in the solver objective.
inline constexpr double kPlbFloor = 1e-12;

/// Fraction of the frame left for data, 1 - n_p L / n.
double data_fraction(const SystemConfig& cfg, double n_p);

/// log2(1 + P_d kappa_b W_a F_b), bits per symbol when aligned.
double aligned_rate_bits(const SystemConfig& cfg, double P_d);

/// Effective-throughput lower bound in bits/symbol, with p_lb unclamped.
double t_lb(const SystemConfig& cfg, const DesignPoint& theta);
/// Same, reusing an already computed p_lb.
double t_lb(const SystemConfig& cfg, const DesignPoint& theta, double plb);

/// Throughput with the Monte-Carlo alignment probability in place of p_lb.
/// The standard error is the alignment standard error scaled by the rate terms.
McEstimate t_approx_mc(const SystemConfig& cfg, const DesignPoint& theta, std::uint64_t trials, std::uint64_t seed);

/// Natural-log objective ln(1 - n_p L/n) + ln clamp(p_lb) + ln ln(1 + P_d kappa_b W_a F_b).
/// Returns -infinity when the data phase vanishes or P_d <= 0.
double objective_f(const SystemConfig& cfg, const DesignPoint& theta);
double objective_f(const SystemConfig& cfg, const DesignPoint& theta, double plb);

/// The three summands of objective_f, evaluated separately.
struct ObjectiveTerms {
    double log_data_fraction;
    double log_alignment;
    double log_log_rate;
};
ObjectiveTerms objective_terms(const SystemConfig& cfg, const DesignPoint& theta, double plb);

} // namespace covertbeam
