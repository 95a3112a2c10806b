#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "covertbeam/errors.hpp"
#include "covertbeam/rng.hpp"
#include "covertbeam/specfun.hpp"

using namespace covertbeam;
using namespace covertbeam::specfun;

namespace {

boost::math::non_central_chi_squared_distribution<double> reference(double lambda) {
    return boost::math::non_central_chi_squared_distribution<double>(2.0, lambda);
}

double relative_gap(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("pdf closed-form values") {
    CHECK(chi2nc_pdf(0.0, 3.0) == doctest::Approx(0.5 * std::exp(-1.5)).epsilon(1e-14));
    CHECK(chi2nc_pdf(0.0, 3.0) == doctest::Approx(0.111565).epsilon(1e-5));
    CHECK(chi2nc_pdf(2.0, 0.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(chi2nc_pdf(2.0, 0.0) == doctest::Approx(0.183940).epsilon(1e-5));
}

TEST_CASE("pdf equals numerical derivative of the cdf") {
    const double t = 50.0;
    const double lambda = 40.0;
    const double h = 1e-3;
    // Fourth-order central difference.
    const double slope = (-chi2nc_cdf(t + 2 * h, lambda) + 8 * chi2nc_cdf(t + h, lambda) -
                          8 * chi2nc_cdf(t - h, lambda) + chi2nc_cdf(t - 2 * h, lambda)) /
                         (12 * h);
    CHECK(relative_gap(chi2nc_pdf(t, lambda), slope) < 1e-6);
}

TEST_CASE("pdf, cdf and sf agree with an independent implementation") {
    for (double lambda : {0.0, 0.3, 1.0, 5.0, 20.0, 100.0, 400.0, 2500.0}) {
        const auto ref = reference(lambda);
        const double mean = 2.0 + lambda;
        const double sd = std::sqrt(4.0 + 4.0 * lambda);
        for (double z : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 6.0}) {
            const double t = std::max(1e-6, mean + z * sd);
            CAPTURE(lambda);
            CAPTURE(t);
            CHECK(relative_gap(chi2nc_pdf(t, lambda), boost::math::pdf(ref, t)) < 1e-9);
            const double F = boost::math::cdf(ref, t);
            const double S = boost::math::cdf(boost::math::complement(ref, t));
            CHECK(std::abs(chi2nc_cdf(t, lambda) - F) < 1e-12 + 1e-10 * F);
            CHECK(std::abs(chi2nc_sf(t, lambda) - S) < 1e-14 + 1e-9 * S);
        }
    }
}

TEST_CASE("cdf closed-form value and limit") {
    CHECK(chi2nc_cdf(2.0, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(chi2nc_cdf(2.0, 0.0) == doctest::Approx(0.632121).epsilon(1e-5));
    double previous = 0.0;
    for (double t = 1.0; t < 200.0; t *= 1.5) {
        const double F = chi2nc_cdf(t, 10.0);
        CHECK(F >= previous);
        previous = F;
    }
    CHECK(previous == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cdf matches quadrature of the pdf") {
    const double direct = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double t) { return chi2nc_pdf(t, 4.0); }, 0.0, 8.0, 15, 1e-13);
    CHECK(std::abs(chi2nc_cdf(8.0, 4.0) - direct) < 1e-9);
}

TEST_CASE("cdf is monotone in t and decreasing in lambda") {
    TrialStream rng(11, 0);
    for (int i = 0; i < 200; ++i) {
        const double lambda = 50.0 * rng.uniform();
        const double a = 80.0 * rng.uniform();
        const double b = a + 5.0 * rng.uniform();
        CHECK(chi2nc_cdf(a, lambda) <= chi2nc_cdf(b, lambda));
        CHECK(chi2nc_cdf(a, lambda + 1.0) <= chi2nc_cdf(a, lambda));
    }
}

TEST_CASE("log cdf agrees with log of the cdf") {
    for (double lambda : {0.0, 2.0, 30.0, 300.0}) {
        for (double t : {1e-8, 1e-3, 0.5, 2.0, 10.0, 40.0, 150.0, 400.0, 1000.0}) {
            const double F = chi2nc_cdf(t, lambda);
            if (F <= 1e-300) continue;
            CAPTURE(lambda);
            CAPTURE(t);
            CHECK(std::abs(chi2nc_log_cdf(t, lambda) - std::log(F)) < 1e-12);
        }
    }
    // Near one the complement carries the information the cdf itself rounds away.
    const double S = chi2nc_sf(200.0, 10.0);
    CHECK(chi2nc_log_cdf(200.0, 10.0) == doctest::Approx(std::log1p(-S)).epsilon(1e-12));
    CHECK(chi2nc_log_cdf(200.0, 10.0) < 0.0);
}

TEST_CASE("quantile examples and round trips") {
    CHECK(chi2nc_quantile(1.0 - std::exp(-1.0), 0.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(chi2nc_quantile(0.5, 0.0) == doctest::Approx(2.0 * std::numbers::ln2).epsilon(1e-9));
    CHECK(chi2nc_quantile(0.5, 0.0) == doctest::Approx(1.386294).epsilon(1e-6));
    const double t = chi2nc_quantile(0.999999, 100.0);
    CHECK(std::abs(chi2nc_cdf(t, 100.0) - 0.999999) < 1e-9);
    for (double lambda : {0.0, 1.0, 25.0, 600.0}) {
        for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1.0 - 1e-12}) {
            const double q = chi2nc_quantile(p, lambda);
            CAPTURE(lambda);
            CAPTURE(p);
            CHECK(std::abs(chi2nc_cdf(q, lambda) - p) <= 1e-10);
            if (p > 1e-9 && p < 1.0 - 1e-9) {
                CHECK(relative_gap(q, boost::math::quantile(reference(lambda), p)) < 1e-6);
            }
        }
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(chi2nc_pdf(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(chi2nc_pdf(1.0, -1.0), DomainError);
    CHECK_THROWS_AS(chi2nc_cdf(-0.1, 1.0), DomainError);
    CHECK_THROWS_AS(chi2nc_cdf(1.0, -0.1), DomainError);
    CHECK_THROWS_AS(chi2nc_quantile(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(chi2nc_quantile(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(chi2nc_quantile(1.5, 1.0), DomainError);
}

TEST_CASE("log Bessel I0 against a reference") {
    for (double z : {0.0, 1e-6, 0.3, 1.0, 7.5, 30.0, 120.0, 499.0, 699.0}) {
        const double expected = std::log(boost::math::cyl_bessel_i(0, z));
        CAPTURE(z);
        CHECK(std::abs(log_bessel_i0(z) - expected) < 1e-12 * std::max(1.0, expected));
    }
    // The large-argument branch joins the series branch smoothly.
    const double below = log_bessel_i0(std::nextafter(700.0, 0.0));
    const double above = log_bessel_i0(700.0);
    CHECK(std::abs(above - below) < 1e-11);
    CHECK(log_bessel_i0(1e6) == doctest::Approx(1e6 - 0.5 * std::log(2 * std::numbers::pi * 1e6)).epsilon(1e-12));
}

TEST_CASE("semi-infinite quadrature reproduces moments") {
    for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
        CAPTURE(lambda);
        const double mass = integrate_semi_infinite([&](double t) { return chi2nc_pdf(t, lambda); }, lambda);
        CHECK(std::abs(mass - 1.0) < 1e-8);
    }
    const double mass = integrate_semi_infinite([](double t) { return chi2nc_pdf(t, 3.0); }, 3.0);
    CHECK(std::abs(mass - 1.0) < 1e-9);
    const double mean = integrate_semi_infinite([](double t) { return t * chi2nc_pdf(t, 5.0); }, 5.0);
    CHECK(std::abs(mean - 7.0) < 1e-6);
    const double half =
        integrate_semi_infinite([](double t) { return chi2nc_cdf(t, 5.0) * chi2nc_pdf(t, 5.0); }, 5.0);
    CHECK(std::abs(half - 0.5) < 1e-8);
}

TEST_CASE("effective support brackets the requested mass") {
    const Interval s = effective_support(20.0);
    CHECK(s.lo >= 0.0);
    CHECK(chi2nc_cdf(s.lo, 20.0) <= 1e-12 * 1.0001);
    CHECK(chi2nc_sf(s.hi, 20.0) <= 1e-12 * 1.0001);
}

TEST_CASE("adaptive quadrature reports non-convergence") {
    // A jump that no panel count resolves to the requested precision.
    auto step = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
    CHECK_THROWS_AS(integrate_adaptive(step, 0.0, 1.0, 1e-15), NumericalError);
    try {
        integrate_adaptive(step, 0.0, 1.0, 1e-15);
    } catch (const NumericalError& e) {
        CHECK(e.last_estimate() == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
    }
}

TEST_CASE("sample mean of simulated draws matches 2 + lambda") {
    for (double lambda : {0.0, 1.0, 10.0, 100.0}) {
        const int draws = 1000000;
        TrialStream rng(5, static_cast<std::uint64_t>(lambda));
        double sum = 0.0;
        double sum_sq = 0.0;
        const double shift = std::sqrt(lambda);
        for (int i = 0; i < draws; ++i) {
            const double a = rng.normal() + shift;
            const double b = rng.normal();
            const double x = a * a + b * b;
            sum += x;
            sum_sq += x * x;
        }
        const double mean = sum / draws;
        const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
        CAPTURE(lambda);
        CHECK(std::abs(mean - (2.0 + lambda)) < 4.0 * se);
        CHECK(sum_sq / draws - mean * mean == doctest::Approx(4.0 + 4.0 * lambda).epsilon(0.02));
    }
}
