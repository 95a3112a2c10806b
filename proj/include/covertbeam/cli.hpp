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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covertbeam/dsca.hpp"
#include "covertbeam/model.hpp"
#include "covertbeam/oracle.hpp"

namespace covertbeam::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

inline constexpr std::string_view kCsvHeader =
    "epsilon,kappa_b_db,kappa_w_db,L_a,L_b,P_a,P_d,n_p,t_lb_bits,t_mc_bits,kl_nats,slack,nu,outer_iters,status";

/// Everything a run needs, in engineering units. SNRs stay in dB here and are
/// converted to linear scale by system().
struct RunConfig {
    int n = 5120;
    int L_a = 32;
    int L_b = 8;
    double backoff_db = 0.5;
    double kappa_b_db = -5.0;
    double kappa_w_db = -15.0;
    std::optional<double> rho;  ///< unset means 1 / L_a
    double epsilon = 0.3;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    int validate_points = 20;
    SolverOptions solver;
    GridSpec grid;

    SystemConfig system() const;

    /// Assigns one key. Throws ConfigError naming the key on unknown keys or
    /// malformed values.
    void set(std::string_view key, std::string_view value);
};

/// Reads flat "key = value" lines; '#' starts a comment. Errors carry
/// "source:line:".
void apply_config(RunConfig& cfg, std::istream& in, const std::string& source);
RunConfig load_config(const std::string& path);

/// "key=value" override as given to --set.
void apply_override(RunConfig& cfg, std::string_view assignment);

struct SweepSpec {
    std::string key;  ///< epsilon, kappa_w_db or L_a
    std::vector<double> values;
};

/// "start:step:stop" (inclusive) or a comma-separated list.
std::vector<double> parse_values(std::string_view text);
/// "key=values" with key in {epsilon, kappa_w_db, L_a}.
SweepSpec parse_sweep(std::string_view text);

/// One CSV row per solve; t_mc is evaluated at the integer solution.
std::string solution_row(const RunConfig& cfg, const Solution& sol, std::optional<double> t_mc);
std::string oracle_row(const RunConfig& cfg, const OracleResult& res, std::optional<double> t_mc);

/// Entry point behind the covertbeam executable.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace covertbeam::cli
