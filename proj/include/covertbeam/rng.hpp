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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace covertbeam {

/// Philox4x32-10 counter-based generator.
///
/// Every Monte-Carlo trial owns an independent stream addressed by
/// (seed, trial index); draws within the trial advance a private counter.
/// Results therefore do not depend on how trials are split across threads.
class TrialStream {
public:
    TrialStream(std::uint64_t seed, std::uint64_t trial) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trial_(trial) {}

    /// Uniform double in the open interval (0, 1).
    double uniform() noexcept {
        if (cached_ == 0) refill();
        const std::uint64_t bits = cached_ == 2 ? (std::uint64_t(block_[0]) << 32) | block_[1]
                                                : (std::uint64_t(block_[2]) << 32) | block_[3];
        --cached_;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller, both outputs used).
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Gamma(shape, 1) draw via Marsaglia-Tsang; shape < 1 uses the power boost.
    double gamma(double shape) noexcept {
        if (shape <= 0.0) return 0.0;
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    void refill() noexcept {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(counter_),
                                         static_cast<std::uint32_t>(counter_ >> 32),
                                         static_cast<std::uint32_t>(trial_),
                                         static_cast<std::uint32_t>(trial_ >> 32)};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        block_ = ctr;
        cached_ = 2;
        ++counter_;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t trial_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int cached_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace covertbeam
