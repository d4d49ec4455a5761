#include <cmath>
#include <random>

#include "bess/ecm.hpp"
#include "bess/errors.hpp"
#include "bess/params.hpp"
#include "doctest.h"

using namespace bess;

TEST_CASE("ocv interpolation") {
    const OcvCurve c({{0.0, 600.0}, {0.5, 700.0}, {1.0, 900.0}});
    CHECK(ocv(0.5, c) == 700.0);
    CHECK(ocv(0.25, c) == doctest::Approx(650.0));
    CHECK(ocv(0.0, c) == 600.0);
    CHECK(ocv(1.0, c) == 900.0);
    CHECK_THROWS_AS(ocv(1.01, c), DomainError);
    CHECK_THROWS_AS(ocv(-0.01, c), DomainError);
    CHECK_THROWS(OcvCurve({{0.0, 600.0}, {0.5, 590.0}, {1.0, 900.0}}));
    CHECK_THROWS(OcvCurve({{0.1, 600.0}, {1.0, 900.0}}));
    // trapezoid mean of the piecewise-linear curve
    CHECK(c.mean_voltage() == doctest::Approx(0.5 * (650.0 + 800.0)));
}

TEST_CASE("default lfp curve is monotone") {
    const OcvCurve c = OcvCurve::lfp_default();
    CHECK(c.points().size() == 21);
    double prev = -1.0;
    for (int k = 0; k <= 1000; ++k) {
        const double v = c.voltage(k / 1000.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("effective resistance and terminal voltage") {
    CHECK(effective_resistance(0.05, 1.0) == 0.05);
    CHECK(effective_resistance(0.05, 1.2) == doctest::Approx(0.06));
    CHECK_THROWS_AS(effective_resistance(0.05, 0.9), DomainError);
    CHECK(terminal_voltage(100.0, 0.1, 0.0) == 100.0);
    CHECK(terminal_voltage(100.0, 0.1, 10.0) == doctest::Approx(101.0));
    CHECK(terminal_voltage(100.0, 0.1, -10.0) == doctest::Approx(99.0));
}

TEST_CASE("current from dc power") {
    CHECK(current_from_dc_power(100.0, 0.1, 0.0) == 0.0);
    // Textbook root of the quadratic, evaluated independently.
    const double textbook = (-100.0 + std::sqrt(100.0 * 100.0 + 4.0 * 0.1 * 1000.0)) / (2.0 * 0.1);
    const double i = current_from_dc_power(100.0, 0.1, 1000.0);
    CHECK(i == doctest::Approx(9.90195).epsilon(1e-6));
    CHECK(i == doctest::Approx(textbook).epsilon(1e-12));
    CHECK((100.0 + 0.1 * i) * i == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK_THROWS_AS(current_from_dc_power(100.0, 0.1, -25000.0), InfeasiblePowerError);
    CHECK_THROWS_AS(current_from_dc_power(100.0, 0.1, -30000.0), InfeasiblePowerError);
    CHECK(current_from_dc_power(100.0, 0.1, -24999.0) < 0.0);
}

TEST_CASE("current is strictly increasing in power; losses are r i^2") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uo(600, 900), ur(0.01, 0.5);
    for (int n = 0; n < 500; ++n) {
        const double o = uo(rng), r = ur(rng);
        const double pmax = o * o / (4 * r);
        double prev = -1e300;
        for (int k = -9; k <= 10; ++k) {
            const double p = 0.09 * pmax * k;
            const double i = current_from_dc_power(o, r, p);
            CHECK(i > prev);
            prev = i;
            if (i != 0.0) {
                const double loss = terminal_voltage(o, r, i) * i - o * i;
                CHECK(loss == doctest::Approx(r * i * i).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("inverter constant mode") {
    const InverterModel m = InverterModel::constant(0.95);
    CHECK(inverter_dc_from_ac(0.0, m, 80.0) == 0.0);
    CHECK(inverter_dc_from_ac(80.0, m, 80.0) == doctest::Approx(76.0));
    CHECK(inverter_dc_from_ac(-76.0, m, 80.0) == doctest::Approx(-80.0));
    CHECK_THROWS_AS(inverter_dc_from_ac(80.5, m, 80.0), SetpointError);
    CHECK(inverter_ac_from_dc(76.0, m, 80.0) == doctest::Approx(80.0));
}

TEST_CASE("inverter curve mode") {
    const InverterModel m = InverterModel::curve(0.005, 0.03);
    // dense sweep: efficiency <= 1 and maximal near sqrt(p0/k)
    double best = 0.0, best_x = 0.0;
    for (int k = 1; k <= 100000; ++k) {
        const double x = k / 100000.0;
        const double e = m.efficiency(x);
        CHECK(e <= 1.0);
        if (e > best) best = e, best_x = x;
    }
    CHECK(best_x == doctest::Approx(std::sqrt(0.005 / 0.03)).epsilon(1e-3));
    CHECK(best == doctest::Approx(0.97).epsilon(0.01));
    CHECK(m.efficiency(0.04) < 0.9);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-80, 80);
    for (int n = 0; n < 2000; ++n) {
        const double ac = u(rng);
        const double dc = inverter_dc_from_ac(ac, m, 80.0);
        if (ac > 0) CHECK(dc < ac);
        if (ac < 0) CHECK(dc < ac);
        CHECK(inverter_ac_from_dc(dc, m, 80.0) == doctest::Approx(ac).epsilon(1e-9));
    }
}

TEST_CASE("default cell parameters") {
    const CellModelParams p = default_cell_params();
    p.validate();
    CHECK(p.v_min == doctest::Approx(p.ocv_curve.min_voltage() - p.r0_ohm * p.i_max_a));
    CHECK(p.v_max == doctest::Approx(p.ocv_curve.max_voltage() + p.r0_ohm * p.i_max_a));
    // rated discharge at soc_min must be reachable within i_max
    const double dc_w = p.p_max_kw * 1000.0 / p.eta_inv;
    const double i = current_from_dc_power(p.ocv_curve.voltage(p.soc_min), p.r0_ohm, -dc_w);
    CHECK(-i < p.i_max_a);
    CellModelParams bad = p;
    bad.soc_min = 0.95;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
