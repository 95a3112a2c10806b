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

#include <cstddef>
#include <vector>

#include "covertbeam/model.hpp"

namespace covertbeam {

/// Exhaustive grid: log-spaced powers and every integer n_p in range.
struct GridSpec {
    int pa_points = 50;
    int pd_points = 50;
    double p_lo = 1e-4;
    double p_hi = 1e2;
    int np_min = 1;
    int np_max = 0;  ///< 0 selects floor(SystemConfig::np_max())
    bool include_zero_power = false;

    std::vector<double> training_powers() const;
    std::vector<double> data_powers() const;
    void validate() const;
};

struct OracleResult {
    bool feasible = false;
    DesignPoint best;
    double t_lb = 0.0;
    std::size_t evaluated = 0;
    std::size_t feasible_points = 0;
};

/// Precomputes p_lb on the (P_a, n_p) grid once so several covertness levels
/// can be searched against the same table.
class GridOracle {
public:
    GridOracle(const SystemConfig& cfg, const GridSpec& spec);

    /// Best covert grid point; ties go to smaller P_d, then P_a, then n_p.
    OracleResult best(double epsilon) const;

    const std::vector<double>& training_powers() const noexcept { return pa_; }
    const std::vector<double>& data_powers() const noexcept { return pd_; }
    const std::vector<int>& training_lengths() const noexcept { return np_; }

private:
    SystemConfig cfg_;
    std::vector<double> pa_;
    std::vector<double> pd_;
    std::vector<int> np_;
    std::vector<double> plb_;  // [pa index * np count + np index]
};

OracleResult grid_search(const SystemConfig& cfg, double epsilon, const GridSpec& spec = {});

} // namespace covertbeam
