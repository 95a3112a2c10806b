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

// Willie's view of a frame. Under H0 he observes unit-variance circular
// Gaussian noise for all n symbols. Under H1 the training phase raises the
// variance to 1 + xi1 on the L_b n_p symbols where Alice's beam points at him
// and to 1 + xi2 on the other L_b (L_a - 1) n_p training symbols; the data
// phase is modelled with the rho-averaged gain, variance 1 + xi3.
//
// All divergences are in nats.
namespace covertbeam {

struct KlBreakdown {
    double xi1 = 0.0;            ///< kappa_w P_a W_a
    double xi2 = 0.0;            ///< kappa_w P_a w_a
    double xi3 = 0.0;            ///< kappa_w P_d (rho W_a + (1 - rho) w_a)
    double term_ba_main = 0.0;   ///< training, Willie in the mainlobe
    double term_ba_side = 0.0;   ///< training, Willie in a sidelobe
    double term_dt = 0.0;        ///< data phase
    double total = 0.0;
};

/// D(CN(0,1) || CN(0,1+xi)) = ln(1+xi) - xi/(1+xi), per complex symbol.
double per_symbol_kl(double xi);

KlBreakdown kl_divergence(const SystemConfig& cfg, const DesignPoint& theta);

/// KL budget 2 eps^2 implied by Pinsker's inequality for xi* >= 1 - eps.
double covertness_budget(double epsilon);

/// kl_divergence(...).total - 2 eps^2; nonpositive means covert.
double covertness_slack(const SystemConfig& cfg, const DesignPoint& theta, double epsilon);

enum class WillieModel {
    /// H1 and the detector both use the single-Gaussian data-phase model.
    averaged,
    /// H1 data-phase variance drawn per frame from the true mainlobe/sidelobe
    /// mixture; the detector is the likelihood-ratio test for that mixture.
    mixture,
};

struct DetectionEstimate {
    double false_alarm = 0.0;
    double miss = 0.0;
    double total_error = 0.0;  ///< false_alarm + miss
    double std_error = 0.0;
};

/// Monte-Carlo total detection error of the equal-prior likelihood-ratio test.
/// Segments are simulated through their energy sufficient statistics
/// (variance times a Gamma(symbol count) draw).
DetectionEstimate detection_error_mc(const SystemConfig& cfg, const DesignPoint& theta, std::uint64_t trials,
                                     std::uint64_t seed, WillieModel model = WillieModel::averaged);

} // namespace covertbeam
