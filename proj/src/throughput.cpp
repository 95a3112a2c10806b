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

#include "covertbeam/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace covertbeam {

double data_fraction(const SystemConfig& cfg, double n_p) {
    return 1.0 - n_p * cfg.L() / static_cast<double>(cfg.n);
}

double aligned_rate_bits(const SystemConfig& cfg, double P_d) {
    return std::log1p(P_d * cfg.aligned_snr_gain()) / std::numbers::ln2;
}

double t_lb(const SystemConfig& cfg, const DesignPoint& theta, double plb) {
    return data_fraction(cfg, theta.n_p) * aligned_rate_bits(cfg, theta.P_d) * plb;
}

double t_lb(const SystemConfig& cfg, const DesignPoint& theta) {
    return t_lb(cfg, theta, p_lb(cfg, theta.P_a, theta.n_p));
}

McEstimate t_approx_mc(const SystemConfig& cfg, const DesignPoint& theta, std::uint64_t trials, std::uint64_t seed) {
    const McEstimate p = p_align_mc(cfg, theta.P_a, theta.n_p, trials, seed);
    const double scale = data_fraction(cfg, theta.n_p) * aligned_rate_bits(cfg, theta.P_d);
    return {scale * p.estimate, scale * p.std_error};
}

ObjectiveTerms objective_terms(const SystemConfig& cfg, const DesignPoint& theta, double plb) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const double fraction = data_fraction(cfg, theta.n_p);
    const double rate_nats = std::log1p(theta.P_d * cfg.aligned_snr_gain());
    return {fraction > 0.0 ? std::log(fraction) : kNegInf, std::log(std::clamp(plb, kPlbFloor, 1.0)),
            rate_nats > 0.0 ? std::log(rate_nats) : kNegInf};
}

double objective_f(const SystemConfig& cfg, const DesignPoint& theta, double plb) {
    const ObjectiveTerms terms = objective_terms(cfg, theta, plb);
    return terms.log_data_fraction + terms.log_alignment + terms.log_log_rate;
}

double objective_f(const SystemConfig& cfg, const DesignPoint& theta) {
    return objective_f(cfg, theta, p_lb(cfg, theta.P_a, theta.n_p));
}

} // namespace covertbeam
