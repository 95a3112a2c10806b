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

#include "covertbeam/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "covertbeam/errors.hpp"

namespace covertbeam::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double t, double lambda, const char* fn) {
    if (!(t >= 0.0) || !(lambda >= 0.0)) {
        throw DomainError(std::string(fn) + ": arguments must be nonnegative (t=" + std::to_string(t) +
                          ", lambda=" + std::to_string(lambda) + ")");
    }
}

struct GaussLegendre {
    static constexpr int kOrder = 10;
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};

    GaussLegendre() {
        // Newton iteration on P_n from the Chebyshev-like initial guesses.
        for (int i = 0; i < kOrder; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= kOrder; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre& gauss_legendre() {
    static const GaussLegendre rule;
    return rule;
}

double composite_rule(const Integrand& f, double a, double b, int panels) {
    const auto& rule = gauss_legendre();
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        const double half = 0.5 * width;
        double panel = 0.0;
        for (int k = 0; k < GaussLegendre::kOrder; ++k) {
            panel += rule.weights[k] * f(mid + half * rule.nodes[k]);
        }
        total += half * panel;
    }
    return total;
}

} // namespace

double log_bessel_i0(double z) {
    if (!(z >= 0.0)) throw DomainError("log_bessel_i0: argument must be nonnegative");
    if (z < 700.0) return std::log(std::cyl_bessel_i(0.0, z));
    // Hankel expansion of e^{-z} sqrt(2 pi z) I0(z); at z >= 700 the omitted
    // terms are below 1e-19.
    const double r = 1.0 / (8.0 * z);
    const double series =
        1.0 + r * (1.0 + r * (4.5 + r * (37.5 + r * (459.375 + r * (7441.875 + r * 150077.8125)))));
    return z - 0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(series);
}

double chi2nc_log_pdf(double t, double lambda) {
    require_nonnegative(t, lambda, "chi2nc_pdf");
    return -std::numbers::ln2 - 0.5 * (t + lambda) + log_bessel_i0(std::sqrt(lambda * t));
}

double chi2nc_pdf(double t, double lambda) {
    return std::exp(chi2nc_log_pdf(t, lambda));
}

CdfPair chi2nc_cdf_pair(double t, double lambda) {
    require_nonnegative(t, lambda, "chi2nc_cdf");
    const double x = 0.5 * t;
    const double mu = 0.5 * lambda;
    if (x == 0.0) return {0.0, 1.0};
    if (x == kInf) return {1.0, 0.0};
    if (mu == 0.0) return {-std::expm1(-x), std::exp(-x)};

    // F = sum_j Pois(j; mu) P(j+1, x). Find the index window around the
    // Poisson mode whose complement carries less than kSeriesTailMass.
    const double log_mu = std::log(mu);
    const double mode = std::floor(mu);
    const double log_w_mode = -mu + mode * log_mu - std::lgamma(mode + 1.0);

    double hi = mode;
    double log_w_hi = log_w_mode;
    for (;;) {
        const double ratio = mu / (hi + 1.0);
        if (std::exp(log_w_hi) * ratio / (1.0 - ratio) < 0.5 * kSeriesTailMass) break;
        log_w_hi += std::log(ratio);
        hi += 1.0;
    }
    double lo = mode;
    double log_w_lo = log_w_mode;
    while (lo > 0.0) {
        const double ratio = lo / mu;
        if (ratio < 1.0 && std::exp(log_w_lo) * ratio / (1.0 - ratio) < 0.5 * kSeriesTailMass) break;
        log_w_lo += std::log(ratio);
        lo -= 1.0;
    }

    const double log_x = std::log(x);
    // Lower incomplete gamma grows downward by the Poisson(x) pmf term, so the
    // cdf is accumulated from the top of the window; the complement is
    // accumulated from the bottom. Both recurrences only add.
    double cdf = 0.0;
    {
        double p = boost::math::gamma_p(hi + 1.0, x);
        double log_w = log_w_hi;
        double log_g = -x + hi * log_x - std::lgamma(hi + 1.0);  // Pois(hi; x)
        cdf += std::exp(log_w) * p;
        for (double j = hi - 1.0; j >= lo; j -= 1.0) {
            p += std::exp(log_g);  // P(j+1) = P(j+2) + Pois(j+1; x)
            log_g += std::log(j + 1.0) - log_x;
            log_w += std::log(j + 1.0) - log_mu;
            cdf += std::exp(log_w) * p;
        }
    }
    double sf = 0.0;
    {
        double q = boost::math::gamma_q(lo + 1.0, x);
        double log_w = log_w_lo;
        double log_g = -x + (lo + 1.0) * log_x - std::lgamma(lo + 2.0);  // Pois(lo+1; x)
        sf += std::exp(log_w) * q;
        for (double j = lo + 1.0; j <= hi; j += 1.0) {
            q += std::exp(log_g);  // Q(j+1) = Q(j) + Pois(j; x)
            log_g += log_x - std::log(j + 1.0);
            log_w += log_mu - std::log(j);
            sf += std::exp(log_w) * q;
        }
    }
    // Each sum misses up to the truncated Poisson mass, which is small only
    // relative to the smaller of the two; the other is its complement.
    if (cdf <= sf) return {cdf, 1.0 - cdf};
    return {1.0 - sf, sf};
}

double chi2nc_cdf(double t, double lambda) {
    return chi2nc_cdf_pair(t, lambda).cdf;
}

double chi2nc_sf(double t, double lambda) {
    return chi2nc_cdf_pair(t, lambda).sf;
}

double chi2nc_log_cdf(double t, double lambda) {
    const auto [cdf, sf] = chi2nc_cdf_pair(t, lambda);
    if (cdf > 0.5) return std::log1p(-sf);
    return cdf > 0.0 ? std::log(cdf) : -kInf;
}

double chi2nc_quantile(double p, double lambda) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("chi2nc_quantile: probability must lie in (0, 1), got " + std::to_string(p));
    }
    if (!(lambda >= 0.0)) throw DomainError("chi2nc_quantile: lambda must be nonnegative");

    // residual(t) is increasing in t and vanishes at the quantile.
    const bool upper = p > 0.5;
    const double target = upper ? 1.0 - p : p;
    auto residual = [&](double t) {
        const auto [cdf, sf] = chi2nc_cdf_pair(t, lambda);
        return upper ? target - sf : cdf - target;
    };

    const double mean = 2.0 + lambda;
    const double sd = std::sqrt(4.0 + 4.0 * lambda);
    double lo = std::max(0.0, mean - 8.0 * sd);
    if (lo > 0.0 && residual(lo) > 0.0) lo = 0.0;
    double hi = mean + 8.0 * sd;
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double r = residual(mid);
        if (r == 0.0) return mid;
        (r < 0.0 ? lo : hi) = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    return 0.5 * (lo + hi);
}

Interval effective_support(double lambda, double tail) {
    return {chi2nc_quantile(tail, lambda), chi2nc_quantile(1.0 - tail, lambda)};
}

double integrate_adaptive(const Integrand& f, double a, double b, double rel_tol) {
    if (!(b > a)) return 0.0;
    constexpr int kInitialPanels = 8;
    constexpr int kMaxDoublings = 12;
    int panels = kInitialPanels;
    double previous = composite_rule(f, a, b, panels);
    for (int level = 0; level < kMaxDoublings; ++level) {
        panels *= 2;
        const double current = composite_rule(f, a, b, panels);
        if (!std::isfinite(current)) {
            throw NumericalError("integrate_adaptive: non-finite estimate", current);
        }
        if (std::abs(current - previous) <= rel_tol * std::abs(current) ||
            std::abs(current - previous) <= std::numeric_limits<double>::min()) {
            return current;
        }
        previous = current;
    }
    throw NumericalError("integrate_adaptive: no convergence after " + std::to_string(panels) + " panels",
                         previous);
}

double integrate_semi_infinite(const Integrand& f, double lambda_center, double rel_tol) {
    const Interval support = effective_support(lambda_center);
    return integrate_adaptive(f, support.lo, support.hi, rel_tol);
}

} // namespace covertbeam::specfun
