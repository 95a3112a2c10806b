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

#include "covertbeam/model.hpp"

namespace covertbeam {

/// Monte-Carlo estimate with its standard error.
struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Per-group miss probabilities of the exhaustive-search union bound.
struct MissBreakdown {
    double alice_sidelobe = 0.0;   ///< aligned pair beaten by an (w_a, F_b) pair
    double bob_sidelobe = 0.0;     ///< ... by a (W_a, f_b) pair
    double double_sidelobe = 0.0;  ///< ... by a (w_a, f_b) pair
    double total() const noexcept { return alice_sidelobe + bob_sidelobe + double_sidelobe; }
};

/// Union-bound miss terms: 1 - integral of F(t|lambda_i)^m_i f(t|lambda_A) dt,
/// integrated directly as (1 - F^m) f so that small misses keep their
/// relative precision.
MissBreakdown miss_probabilities(const SystemConfig& cfg, double P_a, double n_p, double rel_tol = 1e-10);

/// Lower bound on the probability that exhaustive search selects the aligned
/// beam pair. Raw union-bound value: it can be negative where the bound is
/// vacuous and equals exactly 1 when L = 1.
double p_lb(const SystemConfig& cfg, double P_a, double n_p);

/// Monte-Carlo alignment probability: the aligned statistic must strictly
/// exceed all L - 1 competitors (ties count as failures). Trial i draws from
/// its own counter-based stream, so the result is independent of threading.
McEstimate p_align_mc(const SystemConfig& cfg, double P_a, double n_p, std::uint64_t trials, std::uint64_t seed);

} // namespace covertbeam
