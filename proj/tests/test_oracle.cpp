#include <doctest.h>

#include <cmath>

#include "covertbeam/alignment.hpp"
#include "covertbeam/covertness.hpp"
#include "covertbeam/errors.hpp"
#include "covertbeam/oracle.hpp"
#include "covertbeam/throughput.hpp"
#include "support.hpp"

using namespace covertbeam;

namespace {

GridSpec small_grid(int points) {
    GridSpec spec;
    spec.pa_points = points;
    spec.pd_points = points;
    spec.p_lo = 1e-3;
    spec.p_hi = 10.0;
    spec.np_max = 6;
    return spec;
}

} // namespace

TEST_CASE("grid axes") {
    const GridSpec spec = small_grid(5);
    const auto pa = spec.training_powers();
    REQUIRE(pa.size() == 5);
    CHECK(pa.front() == 1e-3);
    CHECK(pa.back() == 10.0);
    CHECK(pa[2] == doctest::Approx(0.1).epsilon(1e-12));
    GridSpec with_zero = spec;
    with_zero.include_zero_power = true;
    CHECK(with_zero.data_powers().size() == 6);
    CHECK(with_zero.data_powers().front() == 0.0);
}

TEST_CASE("oracle matches exhaustive enumeration") {
    const auto cfg = testing_support::reference_config();
    const GridSpec spec = small_grid(7);
    const OracleResult res = grid_search(cfg, 0.2, spec);
    REQUIRE(res.feasible);
    double best = -1e300;
    std::size_t feasible = 0;
    for (double pd : spec.data_powers()) {
        for (double pa : spec.training_powers()) {
            for (int n_p = 1; n_p <= 6; ++n_p) {
                const DesignPoint theta{pa, pd, static_cast<double>(n_p)};
                if (kl_divergence(cfg, theta).total > 2.0 * 0.2 * 0.2) continue;
                ++feasible;
                best = std::max(best, t_lb(cfg, theta));
            }
        }
    }
    CHECK(res.evaluated == 7u * 7u * 6u);
    CHECK(res.feasible_points == feasible);
    CHECK(res.t_lb == doctest::Approx(best).epsilon(1e-12));
    CHECK(covertness_slack(cfg, res.best, 0.2) <= 0.0);
}

TEST_CASE("refining the grid never lowers the optimum") {
    const auto cfg = testing_support::reference_config();
    // 13 log-spaced points contain every point of the 7-point grid.
    const OracleResult coarse = grid_search(cfg, 0.3, small_grid(7));
    const OracleResult fine = grid_search(cfg, 0.3, small_grid(13));
    REQUIRE(coarse.feasible);
    CHECK(fine.t_lb >= coarse.t_lb);
}

TEST_CASE("a tighter budget never raises the optimum") {
    const auto cfg = testing_support::reference_config();
    const GridOracle oracle(cfg, small_grid(9));
    double previous = -1e300;
    for (double epsilon : {0.05, 0.1, 0.2, 0.3}) {
        const OracleResult res = oracle.best(epsilon);
        if (!res.feasible) continue;
        CHECK(res.t_lb >= previous);
        previous = res.t_lb;
    }
}

TEST_CASE("vanishing budget leaves only silence") {
    const auto cfg = testing_support::reference_config();
    GridSpec spec = small_grid(5);
    spec.include_zero_power = true;
    const OracleResult res = grid_search(cfg, 1e-6, spec);
    REQUIRE(res.feasible);
    CHECK(res.t_lb == 0.0);
    // Ties resolve toward the smallest powers and the shortest training.
    CHECK(res.best == DesignPoint{0.0, 0.0, 1.0});

    const OracleResult none = grid_search(cfg, 1e-6, small_grid(5));
    CHECK_FALSE(none.feasible);
}

TEST_CASE("grid validation") {
    const auto cfg = testing_support::reference_config();
    GridSpec bad = small_grid(5);
    bad.pa_points = 0;
    CHECK_THROWS_AS(GridOracle(cfg, bad), ConfigError);
    bad = small_grid(5);
    bad.p_lo = 0.0;
    CHECK_THROWS_AS(GridOracle(cfg, bad), ConfigError);
    bad = small_grid(5);
    bad.np_min = 8;
    CHECK_THROWS_AS(GridOracle(cfg, bad), ConfigError);
}
