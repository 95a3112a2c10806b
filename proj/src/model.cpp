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

#include "covertbeam/model.hpp"

#include <cmath>
#include <string>

#include "covertbeam/errors.hpp"

namespace covertbeam {

namespace {

struct SideGains {
    double main;
    double side;
};

SideGains side_gains(int L, double backoff_db, const char* name) {
    if (L < 1) throw ConfigError(std::string(name) + " must be at least 1");
    if (L == 1) return {1.0, 0.0};
    const double main = L * std::pow(10.0, -backoff_db / 10.0);
    const double side = (2.0 - (2.0 / L) * main) / (2.0 - 2.0 / L);
    if (side < 0.0) {
        throw ConfigError("backoff_db=" + std::to_string(backoff_db) + " makes the " + name +
                          " sidelobe gain negative");
    }
    return {main, side};
}

} // namespace

BeamGains build_gains(int L_a, int L_b, double backoff_db) {
    const auto alice = side_gains(L_a, backoff_db, "L_a");
    const auto bob = side_gains(L_b, backoff_db, "L_b");
    return {alice.main, alice.side, bob.main, bob.side};
}

SystemConfig SystemConfig::from_codebooks(int n, int L_a, int L_b, double backoff_db, double kappa_b,
                                          double kappa_w, double rho) {
    SystemConfig cfg{n, L_a, L_b, backoff_db, kappa_b, kappa_w, rho, build_gains(L_a, L_b, backoff_db)};
    cfg.validate();
    return cfg;
}

SystemConfig SystemConfig::from_gains(int n, int L_a, int L_b, BeamGains gains, double kappa_b,
                                      double kappa_w, double rho) {
    SystemConfig cfg{n, L_a, L_b, 0.0, kappa_b, kappa_w, rho, gains};
    cfg.validate();
    return cfg;
}

double SystemConfig::np_max() const noexcept {
    const double per_pair = static_cast<double>(n) / L();
    const double floor_value = std::floor(per_pair);
    return floor_value == per_pair ? floor_value - 1.0 : floor_value;
}

void SystemConfig::validate() const {
    if (L_a < 1 || L_b < 1) throw ConfigError("codebook sizes L_a, L_b must be at least 1");
    if (n < L()) throw ConfigError("frame length n=" + std::to_string(n) + " is shorter than L=" + std::to_string(L()));
    if (np_max() < 1.0) throw ConfigError("frame length n leaves no room for one training symbol per pair plus data");
    if (!(kappa_b > 0.0) || !(kappa_w > 0.0)) throw ConfigError("kappa_b and kappa_w must be positive");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
    if (gains.W_a <= 0.0 || gains.F_b <= 0.0 || gains.w_a < 0.0 || gains.f_b < 0.0) {
        throw ConfigError("beam gains must be positive (mainlobe) and nonnegative (sidelobe)");
    }
}

Noncentralities noncentralities(const SystemConfig& cfg, double P_a, double n_p) {
    const double scale = 2.0 * cfg.kappa_b * n_p * P_a;
    const auto& g = cfg.gains;
    const std::int64_t la = cfg.L_a - 1;
    const std::int64_t lb = cfg.L_b - 1;
    return {scale * g.W_a * g.F_b, scale * g.w_a * g.F_b, scale * g.W_a * g.f_b, scale * g.w_a * g.f_b,
            1, la, lb, la * lb};
}

double willie_average_gain(const SystemConfig& cfg) {
    return cfg.rho * cfg.gains.W_a + (1.0 - cfg.rho) * cfg.gains.w_a;
}

double db_to_linear(double db) {
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear) {
    return 10.0 * std::log10(linear);
}

} // namespace covertbeam
