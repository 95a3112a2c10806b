#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "covertbeam/covertness.hpp"
#include "covertbeam/errors.hpp"
#include "covertbeam/rng.hpp"
#include "support.hpp"

using namespace covertbeam;

namespace {

// D(P0 || P1) for the per-symbol energy: Exp(1) against Exp(1 + xi).
double kl_by_quadrature(double xi) {
    const double v = 1.0 + xi;
    auto integrand = [v](double e) {
        const double log_p0 = -e;
        const double log_p1 = -std::log(v) - e / v;
        return std::exp(log_p0) * (log_p0 - log_p1);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

} // namespace

TEST_CASE("per-symbol divergence") {
    CHECK(per_symbol_kl(0.0) == 0.0);
    CHECK(per_symbol_kl(0.1) == doctest::Approx(0.0044012).epsilon(1e-4));
    for (double xi : {1e-3, 0.1, 0.5, 2.0, 30.0}) {
        CAPTURE(xi);
        CHECK(per_symbol_kl(xi) == doctest::Approx(kl_by_quadrature(xi)).epsilon(1e-9));
    }
    for (double xi : {1e-8, 1e-6, 1e-4, 1e-3}) {
        CHECK(per_symbol_kl(xi) == doctest::Approx(0.5 * xi * xi).epsilon(2e-3));
    }
    // The series and closed-form branches meet without a visible seam.
    const double below = per_symbol_kl(std::nextafter(1e-4, 0.0));
    const double above = per_symbol_kl(1e-4);
    CHECK(std::abs(above - below) < 1e-18);
}

TEST_CASE("total divergence adds the three phases") {
    const auto cfg = testing_support::reference_config();
    const DesignPoint theta{0.2, 0.4, 3.0};
    const KlBreakdown kl = kl_divergence(cfg, theta);
    const double kw = cfg.kappa_w;
    const double xi1 = kw * 0.2 * cfg.gains.W_a;
    const double xi2 = kw * 0.2 * cfg.gains.w_a;
    const double xi3 = kw * 0.4 * (cfg.gains.W_a / 32.0 + cfg.gains.w_a * 31.0 / 32.0);
    const double expected =
        8 * 3.0 * kl_by_quadrature(xi1) + 8 * 31 * 3.0 * kl_by_quadrature(xi2) + (5120 - 3.0 * 256) * kl_by_quadrature(xi3);
    CHECK(kl.total == doctest::Approx(expected).epsilon(1e-8));
    CHECK(kl.total == doctest::Approx(kl.term_ba_main + kl.term_ba_side + kl.term_dt));
}

TEST_CASE("slack at zero power is minus the budget") {
    const auto cfg = testing_support::reference_config();
    CHECK(covertness_budget(0.1) == doctest::Approx(0.02));
    CHECK(covertness_slack(cfg, DesignPoint{0.0, 0.0, 4.0}, 0.1) == doctest::Approx(-0.02).epsilon(1e-14));
}

TEST_CASE("longer frames leak more") {
    const auto short_frame = SystemConfig::from_codebooks(5120, 32, 8, 0.5, 0.3, 0.03, 1.0 / 32);
    const auto long_frame = SystemConfig::from_codebooks(10240, 32, 8, 0.5, 0.3, 0.03, 1.0 / 32);
    const DesignPoint theta{0.1, 0.1, 2.0};
    CHECK(covertness_slack(long_frame, theta, 0.2) > covertness_slack(short_frame, theta, 0.2));
}

TEST_CASE("divergence is increasing in both powers") {
    const auto cfg = testing_support::reference_config();
    TrialStream rng(31, 0);
    for (int i = 0; i < 200; ++i) {
        const DesignPoint a{std::pow(10.0, -3.0 + 4.0 * rng.uniform()), std::pow(10.0, -3.0 + 4.0 * rng.uniform()),
                            1.0 + 18.0 * rng.uniform()};
        DesignPoint b = a;
        b.P_a *= 1.0 + rng.uniform();
        DesignPoint c = a;
        c.P_d *= 1.0 + rng.uniform();
        const double base = kl_divergence(cfg, a).total;
        CHECK(kl_divergence(cfg, b).total >= base);
        CHECK(kl_divergence(cfg, c).total >= base);
    }
}

TEST_CASE("detector limits") {
    const auto cfg = testing_support::reference_config();
    const DetectionEstimate silent = detection_error_mc(cfg, DesignPoint{0.0, 0.0, 2.0}, 20000, 3);
    CHECK(silent.total_error == doctest::Approx(1.0));
    const DetectionEstimate loud = detection_error_mc(cfg, DesignPoint{1.0, 100.0, 2.0}, 20000, 3);
    CHECK(loud.total_error < 1e-3);
}

TEST_CASE("detection error respects the divergence guarantee") {
    const auto cfg = testing_support::reference_config();
    const double epsilon = 0.3;
    // Data power chosen so the whole budget is spent in the data phase.
    double lo = 0.0;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (covertness_slack(cfg, DesignPoint{0.0, mid, 2.0}, epsilon) > 0.0 ? hi : lo) = mid;
    }
    const DesignPoint theta{0.0, lo, 2.0};
    const DetectionEstimate est = detection_error_mc(cfg, theta, 200000, 5);
    CHECK(est.total_error >= 1.0 - epsilon - 3.0 * est.std_error);
    CHECK(est.total_error < 1.0);

    const DetectionEstimate mix = detection_error_mc(cfg, DesignPoint{0.05, lo, 2.0}, 50000, 5, WillieModel::mixture);
    CHECK(mix.total_error >= 0.0);
    CHECK(mix.total_error <= 1.0);
}

TEST_CASE("detector requires trials") {
    CHECK_THROWS_AS(detection_error_mc(testing_support::reference_config(), DesignPoint{}, 0, 1), DomainError);
}
