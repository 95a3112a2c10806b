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

#include <functional>

/// Noncentral chi-squared law with two degrees of freedom, plus the
/// quadrature used to integrate against it.
///
/// A chi2_2(lambda) variable is |sqrt(lambda) + Z|^2 with Z a unit-variance
/// real Gaussian pair. Its mean is 2 + lambda and its variance 4 + 4 lambda.
/// Every routine here is pure and reentrant.
namespace covertbeam::specfun {

/// Poisson tail mass left out of the cdf mixture series.
inline constexpr double kSeriesTailMass = 1e-14;
/// Tail probability beyond which quadrature domains are truncated.
inline constexpr double kQuadratureTail = 1e-12;

/// ln I0(z) for z >= 0, finite for arbitrarily large z.
double log_bessel_i0(double z);

double chi2nc_log_pdf(double t, double lambda);
double chi2nc_pdf(double t, double lambda);

struct CdfPair {
    double cdf;  ///< F(t)
    double sf;   ///< 1 - F(t), computed directly rather than by subtraction
};

/// Both tails of the cdf, each accurate in the relative sense.
CdfPair chi2nc_cdf_pair(double t, double lambda);
double chi2nc_cdf(double t, double lambda);
double chi2nc_sf(double t, double lambda);
/// ln F(t); uses log1p(-sf) once F exceeds one half.
double chi2nc_log_cdf(double t, double lambda);

/// Smallest t with F(t) = p, by bracketing and bisection. Upper-tail
/// probabilities are solved against the survival function.
double chi2nc_quantile(double p, double lambda);

struct Interval {
    double lo;
    double hi;
};

/// Quantile interval [q(tail), q(1 - tail)] of chi2_2(lambda).
Interval effective_support(double lambda, double tail = kQuadratureTail);

using Integrand = std::function<double(double)>;

/// Composite 10-point Gauss-Legendre on [a, b]; the panel count doubles
/// until two successive estimates agree to rel_tol. Throws NumericalError
/// carrying the last estimate when the refinement budget runs out.
double integrate_adaptive(const Integrand& f, double a, double b, double rel_tol = 1e-9);

/// Integral over [0, inf) of an integrand dominated by the chi2_2(lambda_center)
/// density. The domain is cut to the effective support of that density.
double integrate_semi_infinite(const Integrand& f, double lambda_center, double rel_tol = 1e-9);

} // namespace covertbeam::specfun
