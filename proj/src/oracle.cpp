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

#include "covertbeam/oracle.hpp"

#include <cmath>

#include "covertbeam/alignment.hpp"
#include "covertbeam/covertness.hpp"
#include "covertbeam/errors.hpp"
#include "covertbeam/parallel.hpp"
#include "covertbeam/throughput.hpp"

namespace covertbeam {

namespace {

std::vector<double> log_grid(int points, double lo, double hi, bool with_zero) {
    std::vector<double> grid;
    if (with_zero) grid.push_back(0.0);
    if (points == 1) {
        grid.push_back(lo);
        return grid;
    }
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) grid.push_back(i + 1 == points ? hi : lo * std::exp(step * i));
    return grid;
}

} // namespace

std::vector<double> GridSpec::training_powers() const {
    return log_grid(pa_points, p_lo, p_hi, include_zero_power);
}

std::vector<double> GridSpec::data_powers() const {
    return log_grid(pd_points, p_lo, p_hi, include_zero_power);
}

void GridSpec::validate() const {
    if (pa_points < 1 || pd_points < 1) throw ConfigError("grid needs at least one power per axis");
    if (!(p_lo > 0.0 && p_hi >= p_lo)) throw ConfigError("grid power range requires 0 < p_lo <= p_hi");
    if (np_min < 1) throw ConfigError("grid n_p range must start at 1 or above");
}

GridOracle::GridOracle(const SystemConfig& cfg, const GridSpec& spec)
    : cfg_(cfg), pa_(spec.training_powers()), pd_(spec.data_powers()) {
    spec.validate();
    cfg.validate();
    const int top = spec.np_max > 0 ? spec.np_max : static_cast<int>(std::floor(cfg.np_max()));
    for (int k = spec.np_min; k <= top; ++k) np_.push_back(k);
    if (np_.empty()) throw ConfigError("grid n_p range is empty");

    plb_.assign(pa_.size() * np_.size(), 0.0);
    parallel_for(plb_.size(), [&](std::size_t idx) {
        const std::size_t i = idx / np_.size();
        const std::size_t k = idx % np_.size();
        plb_[idx] = p_lb(cfg_, pa_[i], np_[k]);
    });
}

OracleResult GridOracle::best(double epsilon) const {
    OracleResult out;
    const double budget = covertness_budget(epsilon);
    for (double pd : pd_) {
        for (std::size_t i = 0; i < pa_.size(); ++i) {
            for (std::size_t k = 0; k < np_.size(); ++k) {
                ++out.evaluated;
                const DesignPoint point{pa_[i], pd, static_cast<double>(np_[k])};
                if (kl_divergence(cfg_, point).total > budget) continue;
                ++out.feasible_points;
                const double value = t_lb(cfg_, point, plb_[i * np_.size() + k]);
                if (!out.feasible || value > out.t_lb) {
                    out.feasible = true;
                    out.best = point;
                    out.t_lb = value;
                }
            }
        }
    }
    return out;
}

OracleResult grid_search(const SystemConfig& cfg, double epsilon, const GridSpec& spec) {
    return GridOracle(cfg, spec).best(epsilon);
}

} // namespace covertbeam
