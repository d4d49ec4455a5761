#include <algorithm>
#include <random>

#include "bess/metrics.hpp"
#include "doctest.h"

using namespace bess;

namespace {

StringLog log_of(const std::vector<std::pair<double, double>>& planned_realized, const std::vector<double>& prices) {
    StringLog sl;
    sl.name = "X";
    for (std::size_t k = 0; k < prices.size(); ++k) {
        StepRecord r;
        r.time = static_cast<Seconds>(k) * kHour;
        r.price = prices[k];
        r.planned_kw = planned_realized[k].first;
        r.realized_kw = planned_realized[k].second;
        sl.steps.push_back(r);
    }
    return sl;
}

}  // namespace

TEST_CASE("mismatch") {
    CHECK(power_schedule_mismatch(log_of({{50, 50}, {-50, -50}}, {1, 2})) == 0.0);
    CHECK(power_schedule_mismatch(log_of({{50, 45}, {-50, -45}}, {1, 2})) == doctest::Approx(0.10));
    CHECK(power_schedule_mismatch(log_of({{0, 0}}, {1})) == 0.0);
    // signed sums let opposite errors cancel
    const StringLog l = log_of({{50, 40}, {-50, -40}, {10, 10}}, {1, 2, 3});
    CHECK(power_schedule_mismatch(l, MismatchMode::absolute) == doctest::Approx(1.0 - 90.0 / 110.0));
    CHECK(power_schedule_mismatch(l, MismatchMode::signed_sum) == doctest::Approx(0.0));
}

TEST_CASE("revenue") {
    CHECK(revenue(log_of({{0, 0}}, {50}), kHour) == 0.0);
    // discharge 1 MWh at 100, charge 1 MWh at 40
    CHECK(revenue(log_of({{-1000, -1000}, {1000, 1000}}, {100, 40}), kHour) == doctest::Approx(60.0));
}

TEST_CASE("missed revenue") {
    CHECK(*missed_revenue(log_of({{-1000, -1000}}, {100}), kHour) == 0.0);
    CHECK(*missed_revenue(log_of({{-1000, -900}}, {100}), kHour) == doctest::Approx((90.0 - 100.0) / 90.0));
    CHECK_FALSE(missed_revenue(log_of({{0, 0}}, {100}), kHour));
}

TEST_CASE("soh ratio") {
    CHECK_FALSE(revenue_per_soh_loss(100.0, 0.0));
    CHECK(*revenue_per_soh_loss(4846.0, 0.051) == doctest::Approx(4846.0 / 0.051));
    CHECK(*revenue_per_soh_loss(2 * 4846.0, 0.051) == doctest::Approx(2 * *revenue_per_soh_loss(4846.0, 0.051)));
    StringLog sl;
    sl.initial.q_loss_cal = 0.01;
    sl.final_state.q_loss_cal = 0.03;
    sl.final_state.q_loss_cyc = 0.01;
    CHECK(delta_soh(sl) == doctest::Approx(0.03));
}

TEST_CASE("revenue is invariant under reordering") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-80, 80), up(0, 200);
    std::vector<std::pair<double, double>> pr;
    std::vector<double> prices;
    for (int k = 0; k < 50; ++k) {
        const double p = u(rng);
        pr.push_back({p, p});
        prices.push_back(up(rng));
    }
    const double r0 = revenue(log_of(pr, prices), 5 * kMinute);
    std::vector<std::size_t> idx(50);
    for (std::size_t k = 0; k < 50; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::pair<double, double>> pr2;
    std::vector<double> prices2;
    for (auto k : idx) {
        pr2.push_back(pr[k]);
        prices2.push_back(prices[k]);
    }
    CHECK(revenue(log_of(pr2, prices2), 5 * kMinute) == doctest::Approx(r0).epsilon(1e-12));
}

TEST_CASE("kpi report aggregates") {
    RunLog log;
    log.scenario = "II";
    log.dt = kHour;
    log.strings.push_back(log_of({{-1000, -1000}, {1000, 1000}}, {100, 40}));
    log.strings.push_back(log_of({{-500, -400}, {500, 500}}, {120, 30}));
    log.strings[0].name = "A";
    log.strings[1].name = "B";
    log.strings[0].final_state.q_loss_cal = 0.01;
    log.strings[1].final_state.q_loss_cyc = 0.03;
    log.strings[0].final_state.fec_total = 1.5;
    log.strings[1].final_state.fec_total = 2.0;
    const KpiReport r = kpi_report(log);
    REQUIRE(r.strings.size() == 2);
    CHECK(r.system.revenue == doctest::Approx(r.strings[0].revenue + r.strings[1].revenue));
    CHECK(r.system.delta_fec == doctest::Approx(3.5));
    CHECK(*r.system.revenue_per_soh_loss == doctest::Approx(r.system.revenue / 0.04));
    CHECK(*r.ratio_sum == doctest::Approx(r.strings[0].revenue / 0.01 + r.strings[1].revenue / 0.03));
    CHECK(r.system.mismatch == doctest::Approx(1.0 - 2900.0 / 3000.0));

    RunLog idle;
    idle.strings.push_back(log_of({{0, 0}}, {50}));
    const KpiReport z = kpi_report(idle);
    CHECK(z.system.revenue == 0.0);
    CHECK_FALSE(z.system.revenue_per_soh_loss);
    CHECK_FALSE(z.strings[0].missed_revenue);

    const std::string table = format_kpi_table({r, r});
    CHECK(table.find("scenario II") != std::string::npos);
    CHECK(table.find("String B") != std::string::npos);
    CHECK(table.find("Revenue per unit SOH loss") != std::string::npos);
    CHECK(kpi_csv({r}).rfind("scenario,string,mismatch", 0) == 0);
    CHECK(kpi_json({r}).find("\"ratio_sum\"") != std::string::npos);
}
