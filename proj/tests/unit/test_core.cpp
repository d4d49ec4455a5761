#include <random>

#include "bess/core.hpp"
#include "bess/errors.hpp"
#include "doctest.h"

using namespace bess;

namespace {
constexpr Seconds t0 = 1609459200;
}

TEST_CASE("time grid step counts") {
    CHECK(build_time_grid(t0, 12 * kHour, 5 * kMinute).n_steps == 144);
    CHECK(build_time_grid(t0, 5 * kMinute, 5 * kMinute).n_steps == 1);
    CHECK(build_time_grid(t0, 4 * kHour, 5 * kMinute).n_steps == 48);
    CHECK_THROWS_AS(build_time_grid(t0, 7 * kMinute, 5 * kMinute), ConfigError);
    CHECK_THROWS_AS(build_time_grid(t0, kHour, 0), ConfigError);
}

TEST_CASE("grid durations sum exactly over a long span") {
    const TimeGrid g = build_time_grid(t0, 365 * kDay, 5 * kMinute);
    Seconds total = 0;
    for (std::int64_t k = 0; k < g.n_steps; ++k) total += g.dt;
    CHECK(total == 365 * kDay);
    CHECK(g.time_at(g.n_steps) == g.end());
    const TimeGrid s = g.slice(10, 48);
    CHECK(s.start == g.time_at(10));
    CHECK(s.n_steps == 48);
}

TEST_CASE("zero-order hold resampling") {
    SUBCASE("hourly constant onto 5 minutes") {
        const PriceSeries hourly(build_time_grid(t0, 2 * kHour, kHour), {50.0, 50.0});
        const PriceSeries out = resample_zoh(hourly, build_time_grid(t0, kHour, 5 * kMinute));
        REQUIRE(out.prices.size() == 12);
        for (double p : out.prices) CHECK(p == 50.0);
    }
    SUBCASE("step function") {
        const PriceSeries src(build_time_grid(t0, 2 * kHour, kHour), {10.0, 20.0});
        const PriceSeries out = resample_zoh(src, build_time_grid(t0, 2 * kHour, 30 * kMinute));
        CHECK(out.prices == std::vector<double>{10, 10, 20, 20});
    }
    SUBCASE("identity and idempotence") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-50, 200);
        std::vector<double> v(37);
        for (auto& x : v) x = u(rng);
        const PriceSeries src(build_time_grid(t0, 37 * 15 * kMinute, 15 * kMinute), v);
        CHECK(resample_zoh(src, src.grid).prices == v);
        const TimeGrid fine = build_time_grid(t0 + 5 * kMinute, 30 * 15 * kMinute, 5 * kMinute);
        const PriceSeries once = resample_zoh(src, fine);
        CHECK(resample_zoh(once, fine).prices == once.prices);
    }
    SUBCASE("coverage gap names the interval") {
        const PriceSeries src(build_time_grid(t0, kHour, kHour), {10.0});
        try {
            resample_zoh(src, build_time_grid(t0, 2 * kHour, kHour));
            FAIL("expected an ingestion error");
        } catch (const IngestionError& e) {
            CHECK(std::string(e.what()).find("2021-01-01T01:00:00Z") != std::string::npos);
        }
    }
    SUBCASE("irregular samples") {
        const std::vector<Seconds> times{t0, t0 + 20 * kMinute, t0 + 40 * kMinute};
        const std::vector<double> vals{1.0, 2.0, 3.0};
        const PriceSeries out = resample_zoh(times, vals, t0 + kHour, build_time_grid(t0, kHour, 10 * kMinute));
        CHECK(out.prices == std::vector<double>{1, 1, 2, 2, 3, 3});
    }
}

TEST_CASE("price series validation") {
    CHECK_THROWS_AS(PriceSeries(build_time_grid(t0, kHour, kHour), {1.0, 2.0}), Error);
    CHECK_THROWS_AS(PriceSeries(build_time_grid(t0, kHour, kHour), {std::nan("")}), IngestionError);
}

TEST_CASE("soh is derived from the loss accumulators") {
    StringState s;
    CHECK(s.soh() == 1.0);
    double prev = s.soh();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-6, 1e-3);
    for (int k = 0; k < 200; ++k) {
        if (k % 2) s.q_loss_cal += u(rng);
        else s.q_loss_cyc += u(rng);
        CHECK(s.soh() < prev);
        prev = s.soh();
    }
    StringState bad;
    bad.r_incr = 0.9;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("utc formatting round trip") {
    CHECK(format_utc(t0) == "2021-01-01T00:00:00Z");
    CHECK(parse_utc("2021-01-01T00:00:00Z") == t0);
    CHECK(parse_utc("2021-01-01 01:30") == t0 + 90 * kMinute);
    CHECK(parse_utc("2021-03-01T00:00:00+00:00") == t0 + 59 * kDay);
    CHECK_THROWS_AS(parse_utc("yesterday"), IngestionError);
}
