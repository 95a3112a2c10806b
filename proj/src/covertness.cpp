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

#include "covertbeam/covertness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "covertbeam/errors.hpp"
#include "covertbeam/parallel.hpp"
#include "covertbeam/rng.hpp"

namespace covertbeam {

double per_symbol_kl(double xi) {
    if (std::abs(xi) < 1e-4) {
        // xi^2/2 - 2 xi^3/3 + 3 xi^4/4 - ...
        return xi * xi * (0.5 - xi * (2.0 / 3.0 - 0.75 * xi));
    }
    return std::log1p(xi) - xi / (1.0 + xi);
}

KlBreakdown kl_divergence(const SystemConfig& cfg, const DesignPoint& theta) {
    KlBreakdown kl;
    kl.xi1 = cfg.kappa_w * theta.P_a * cfg.gains.W_a;
    kl.xi2 = cfg.kappa_w * theta.P_a * cfg.gains.w_a;
    kl.xi3 = cfg.kappa_w * theta.P_d * willie_average_gain(cfg);
    const double training_per_beam = cfg.L_b * theta.n_p;
    kl.term_ba_main = training_per_beam * per_symbol_kl(kl.xi1);
    kl.term_ba_side = training_per_beam * (cfg.L_a - 1) * per_symbol_kl(kl.xi2);
    kl.term_dt = (cfg.n - theta.n_p * cfg.L()) * per_symbol_kl(kl.xi3);
    kl.total = kl.term_ba_main + kl.term_ba_side + kl.term_dt;
    return kl;
}

double covertness_budget(double epsilon) {
    return 2.0 * epsilon * epsilon;
}

double covertness_slack(const SystemConfig& cfg, const DesignPoint& theta, double epsilon) {
    return kl_divergence(cfg, theta).total - covertness_budget(epsilon);
}

namespace {

struct Segment {
    double symbols;
    double variance;  // under H1
};

// ln p1(E)/p0(E) for an energy E over `symbols` unit-noise symbols.
double segment_llr(double energy, double symbols, double variance) {
    return -symbols * std::log(variance) + energy * (1.0 - 1.0 / variance);
}

} // namespace

DetectionEstimate detection_error_mc(const SystemConfig& cfg, const DesignPoint& theta, std::uint64_t trials,
                                     std::uint64_t seed, WillieModel model) {
    if (trials == 0) throw DomainError("detection_error_mc: trials must be at least 1");
    const KlBreakdown kl = kl_divergence(cfg, theta);
    const double data_symbols = cfg.n - theta.n_p * cfg.L();
    const std::array<Segment, 2> training{Segment{cfg.L_b * theta.n_p, 1.0 + kl.xi1},
                                          Segment{cfg.L_b * (cfg.L_a - 1) * theta.n_p, 1.0 + kl.xi2}};
    const double averaged_var = 1.0 + kl.xi3;
    const double main_var = 1.0 + cfg.kappa_w * theta.P_d * cfg.gains.W_a;
    const double side_var = 1.0 + cfg.kappa_w * theta.P_d * cfg.gains.w_a;
    const bool mixture = model == WillieModel::mixture;

    auto data_llr = [&](double energy) {
        if (!mixture) return segment_llr(energy, data_symbols, averaged_var);
        const double a = std::log(cfg.rho) + segment_llr(energy, data_symbols, main_var);
        const double b = std::log1p(-cfg.rho) + segment_llr(energy, data_symbols, side_var);
        const double top = std::max(a, b);
        return top + std::log(std::exp(a - top) + std::exp(b - top));
    };

    // One frame: draw segment energies under the chosen hypothesis and return
    // the log-likelihood ratio.
    auto frame_llr = [&](TrialStream& rng, bool signal) {
        double llr = 0.0;
        for (const auto& seg : training) {
            if (seg.symbols <= 0.0) continue;
            const double energy = (signal ? seg.variance : 1.0) * rng.gamma(seg.symbols);
            llr += segment_llr(energy, seg.symbols, seg.variance);
        }
        if (data_symbols > 0.0) {
            double variance = 1.0;
            if (signal) {
                variance = mixture ? (rng.uniform() < cfg.rho ? main_var : side_var) : averaged_var;
            }
            llr += data_llr(variance * rng.gamma(data_symbols));
        }
        return llr;
    };

    constexpr std::uint64_t kChunk = 8192;
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> false_alarms(chunks, 0);
    std::vector<std::uint64_t> misses(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(trials, begin + kChunk);
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            TrialStream noise_only(seed, 2 * trial);
            TrialStream with_signal(seed, 2 * trial + 1);
            if (frame_llr(noise_only, false) > 0.0) ++false_alarms[c];
            if (frame_llr(with_signal, true) <= 0.0) ++misses[c];
        }
    });

    std::uint64_t fa = 0;
    std::uint64_t md = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        fa += false_alarms[c];
        md += misses[c];
    }
    const double n = static_cast<double>(trials);
    DetectionEstimate out;
    out.false_alarm = fa / n;
    out.miss = md / n;
    out.total_error = out.false_alarm + out.miss;
    out.std_error = std::sqrt(out.false_alarm * (1.0 - out.false_alarm) / n + out.miss * (1.0 - out.miss) / n);
    return out;
}

} // namespace covertbeam
