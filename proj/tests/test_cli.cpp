#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "covertbeam/cli.hpp"
#include "covertbeam/errors.hpp"

using namespace covertbeam;
using namespace covertbeam::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "covertbeam");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

} // namespace

TEST_CASE("configuration files") {
    RunConfig cfg;
    std::istringstream good("# comment\nepsilon = 0.2\n\nkappa_w_db=-20  # trailing\nL_a = 16\nmax_outer = 40\n");
    apply_config(cfg, good, "good.cfg");
    CHECK(cfg.epsilon == 0.2);
    CHECK(cfg.kappa_w_db == -20.0);
    CHECK(cfg.L_a == 16);
    CHECK(cfg.solver.max_outer == 40);
    CHECK(cfg.system().rho == doctest::Approx(1.0 / 16.0));

    std::istringstream bad_value("epsilon = 0.2\nkappa_w_db = loud\n");
    try {
        apply_config(cfg, bad_value, "bad.cfg");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.cfg:2:") != std::string::npos);
    }
    std::istringstream unknown("colour = blue\n");
    CHECK_THROWS_AS(apply_config(cfg, unknown, "x.cfg"), ConfigError);
    std::istringstream no_equals("epsilon 0.2\n");
    CHECK_THROWS_AS(apply_config(cfg, no_equals, "x.cfg"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/covertbeam.cfg"), ConfigError);
}

TEST_CASE("overrides") {
    RunConfig cfg;
    apply_override(cfg, "epsilon=0.15");
    apply_override(cfg, "rho=0.5");
    apply_override(cfg, "eta0=2");
    CHECK(cfg.epsilon == 0.15);
    CHECK(cfg.system().rho == 0.5);
    REQUIRE(cfg.solver.eta0);
    CHECK(*cfg.solver.eta0 == 2.0);
    CHECK_THROWS_AS(apply_override(cfg, "epsilon"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "L_a=2.5"), ConfigError);
}

TEST_CASE("value lists and ranges") {
    CHECK(parse_values("0.05:0.05:0.3") == std::vector<double>{0.05, 0.1, 0.15, 0.2, 0.25, 0.3});
    CHECK(parse_values("-25:5:-10") == std::vector<double>{-25, -20, -15, -10});
    CHECK(parse_values("3:-1:1") == std::vector<double>{3, 2, 1});
    CHECK(parse_values("8,16, 32") == std::vector<double>{8, 16, 32});
    CHECK(parse_values("0.1") == std::vector<double>{0.1});
    CHECK_THROWS_AS(parse_values("1:0:2"), ConfigError);
    CHECK_THROWS_AS(parse_values("1:1:0"), ConfigError);
    CHECK_THROWS_AS(parse_values("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_values("1,x"), ConfigError);

    const SweepSpec spec = parse_sweep("kappa_w_db=-25:5:-10");
    CHECK(spec.key == "kappa_w_db");
    CHECK(spec.values.size() == 4);
    CHECK_THROWS_AS(parse_sweep("n=1,2"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("L_a=8,12.5"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("epsilon"), ConfigError);
}

TEST_CASE("solve output is deterministic and carries the header") {
    const std::vector<std::string> args{"solve", "--trials", "2000", "--set", "epsilon=0.2"};
    const Outcome a = invoke(args);
    const Outcome b = invoke(args);
    CHECK(a.code == kExitOk);
    CHECK(first_line(a.out) == kCsvHeader);
    CHECK(a.out == b.out);
    CHECK(a.out.find(",converged") != std::string::npos);
}

TEST_CASE("oracle subcommand") {
    const Outcome res = invoke({"oracle", "--trials", "0", "--set", "grid_pa_points=6", "--set", "grid_pd_points=6",
                                "--set", "grid_np_max=4"});
    CHECK(res.code == kExitOk);
    CHECK(first_line(res.out) == kCsvHeader);
    CHECK(res.out.find(",grid_optimum") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(invoke({}).code == kExitError);
    CHECK(invoke({"bogus"}).code == kExitError);
    const Outcome unknown = invoke({"solve", "--set", "colour=blue"});
    CHECK(unknown.code == kExitError);
    CHECK(unknown.err.find("unknown key") != std::string::npos);
    CHECK(invoke({"solve", "--config", "/nonexistent/x.cfg"}).code == kExitError);
    CHECK(invoke({"sweep", "n=1,2"}).code == kExitError);

    const Outcome silent = invoke({"solve", "--trials", "0", "--set", "epsilon=1e-9"});
    CHECK(silent.code == kExitInfeasible);
    CHECK(silent.out.find(",infeasible") != std::string::npos);
}
