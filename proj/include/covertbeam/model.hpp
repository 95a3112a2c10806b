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

namespace covertbeam {

/// Flat-top beam gains. Alice transmits with mainlobe W_a / sidelobe w_a,
/// Bob receives with mainlobe F_b / sidelobe f_b.
struct BeamGains {
    double W_a = 1.0;
    double w_a = 0.0;
    double F_b = 1.0;
    double f_b = 0.0;
};

/// Mainlobe gain L * 10^(-backoff_db / 10) with the sidelobe set by energy
/// conservation: W/L + w (1 - 1/L) = 1. A single-beam codebook is an omni
/// beam with unit gain and no sidelobe.
BeamGains build_gains(int L_a, int L_b, double backoff_db);

/// Link and codebook parameters. Noise variances are normalized to one, so
/// channel strengths enter only through kappa_b and kappa_w (linear SNRs).
struct SystemConfig {
    int n = 5120;            ///< frame length in symbols
    int L_a = 32;            ///< Alice codebook size
    int L_b = 8;             ///< Bob codebook size
    double backoff_db = 0.5;
    double kappa_b = 0.0;    ///< Alice-Bob pre-beamforming SNR
    double kappa_w = 0.0;    ///< Alice-Willie pre-beamforming SNR
    double rho = 0.0;        ///< P(Willie inside Alice's data-beam mainlobe)
    BeamGains gains;

    /// Config with gains derived from codebook sizes and backoff.
    static SystemConfig from_codebooks(int n, int L_a, int L_b, double backoff_db, double kappa_b,
                                       double kappa_w, double rho);
    /// Config with explicitly supplied gains (energy conservation not enforced).
    static SystemConfig from_gains(int n, int L_a, int L_b, BeamGains gains, double kappa_b, double kappa_w,
                                   double rho);

    int L() const noexcept { return L_a * L_b; }
    /// Largest relaxed n_p. The wall n_p = n/L leaves no data phase, so it is
    /// excluded when n/L is an integer.
    double np_max() const noexcept;
    /// kappa_b W_a F_b: data-phase SNR per unit power after alignment.
    double aligned_snr_gain() const noexcept { return kappa_b * gains.W_a * gains.F_b; }

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Decision vector: training power, data power, symbols per trained beam pair.
struct DesignPoint {
    double P_a = 0.0;
    double P_d = 0.0;
    double n_p = 1.0;

    bool operator==(const DesignPoint&) const = default;
};

/// Noncentralities of the matched-filter statistics for the aligned pair (A),
/// Alice-sidelobe pairs (B), Bob-sidelobe pairs (C) and double-sidelobe pairs (D).
struct Noncentralities {
    double lambda_A = 0.0;
    double lambda_B = 0.0;
    double lambda_C = 0.0;
    double lambda_D = 0.0;
    std::int64_t m_A = 1;
    std::int64_t m_B = 0;
    std::int64_t m_C = 0;
    std::int64_t m_D = 0;
};

Noncentralities noncentralities(const SystemConfig& cfg, double P_a, double n_p);

/// rho W_a + (1 - rho) w_a: Willie's expected gain from the data beam.
double willie_average_gain(const SystemConfig& cfg);

double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace covertbeam
