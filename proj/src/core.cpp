#include "bess/core.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "core";

std::string interval_text(Seconds a, Seconds b) { return "[" + format_utc(a) + ", " + format_utc(b) + ")"; }
}  // namespace

TimeGrid TimeGrid::slice(std::int64_t offset, std::int64_t count) const {
    if (offset < 0 || count < 1 || offset + count > n_steps) {
        throw DomainError(kModule, "grid slice out of range");
    }
    return TimeGrid{time_at(offset), dt, count};
}

TimeGrid build_time_grid(Seconds start, Seconds span, Seconds dt) {
    if (dt <= 0) throw ConfigError(kModule, "time step must be positive");
    if (span <= 0) throw ConfigError(kModule, "span must be positive");
    if (span % dt != 0) {
        throw ConfigError(kModule, "span of " + std::to_string(span) + " s is not a multiple of dt = " +
                                       std::to_string(dt) + " s");
    }
    return TimeGrid{start, dt, span / dt};
}

PriceSeries::PriceSeries(TimeGrid g, std::vector<double> p) : grid(g), prices(std::move(p)) {
    if (static_cast<std::int64_t>(prices.size()) != grid.n_steps) {
        throw DomainError(kModule, "price count does not match grid length");
    }
    for (std::size_t k = 0; k < prices.size(); ++k) {
        if (!std::isfinite(prices[k])) {
            throw IngestionError(kModule, "non-finite price at " + format_utc(grid.time_at(static_cast<std::int64_t>(k))));
        }
    }
}

PriceSeries PriceSeries::slice(std::int64_t offset, std::int64_t count) const {
    TimeGrid g = grid.slice(offset, count);
    return PriceSeries(g, std::vector<double>(prices.begin() + offset, prices.begin() + offset + count));
}

double PriceSeries::mean() const {
    if (prices.empty()) return 0.0;
    return std::accumulate(prices.begin(), prices.end(), 0.0) / static_cast<double>(prices.size());
}

PriceSeries resample_zoh(const PriceSeries& series, const TimeGrid& target) {
    if (series.grid == target) return series;
    if (target.start < series.grid.start) {
        throw IngestionError(kModule, "price data missing for " + interval_text(target.start, series.grid.start));
    }
    if (target.end() > series.grid.end()) {
        throw IngestionError(kModule, "price data missing for " + interval_text(series.grid.end(), target.end()));
    }
    std::vector<double> out(static_cast<std::size_t>(target.n_steps));
    for (std::int64_t k = 0; k < target.n_steps; ++k) {
        const Seconds offset = target.time_at(k) - series.grid.start;
        out[static_cast<std::size_t>(k)] = series.prices[static_cast<std::size_t>(offset / series.grid.dt)];
    }
    return PriceSeries(target, std::move(out));
}

PriceSeries resample_zoh(std::span<const Seconds> times, std::span<const double> values, Seconds source_end,
                         const TimeGrid& target) {
    if (times.empty() || times.size() != values.size()) {
        throw IngestionError(kModule, "price samples empty or misaligned");
    }
    if (target.start < times.front()) {
        throw IngestionError(kModule, "price data missing for " + interval_text(target.start, times.front()));
    }
    if (target.end() > source_end) {
        throw IngestionError(kModule, "price data missing for " + interval_text(source_end, target.end()));
    }
    std::vector<double> out(static_cast<std::size_t>(target.n_steps));
    std::size_t j = 0;
    for (std::int64_t k = 0; k < target.n_steps; ++k) {
        const Seconds t = target.time_at(k);
        while (j + 1 < times.size() && times[j + 1] <= t) ++j;
        out[static_cast<std::size_t>(k)] = values[j];
    }
    return PriceSeries(target, std::move(out));
}

void StringState::validate() const {
    if (!(soc >= 0.0 && soc <= 1.0)) throw DomainError(kModule, "SOC outside [0, 1]");
    if (!(q_loss_cal >= 0.0) || !(q_loss_cyc >= 0.0)) throw DomainError(kModule, "negative loss accumulator");
    if (!(soh() > 0.0 && soh() <= 1.0)) throw DomainError(kModule, "SOH outside (0, 1]");
    if (!(r_incr >= 1.0)) throw DomainError(kModule, "resistance increase factor below 1");
    if (!(fec_total >= 0.0)) throw DomainError(kModule, "negative cycle count");
}

std::string format_utc(Seconds t) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{t}};
    const auto day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss hms{tp - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(hms.hours().count()), static_cast<long long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

Seconds parse_utc(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    int n = std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &consumed);
    if (n < 6 || (sep != 'T' && sep != ' ')) throw IngestionError(kModule, "unparseable timestamp '" + text + "'");
    std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest[0] == ':') {
        int c2 = 0;
        if (std::sscanf(rest.c_str(), ":%2d%n", &s, &c2) != 1) {
            throw IngestionError(kModule, "unparseable timestamp '" + text + "'");
        }
        rest = rest.substr(static_cast<std::size_t>(c2));
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) {
        throw IngestionError(kModule, "timestamp '" + text + "' is not UTC");
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw IngestionError(kModule, "invalid date '" + text + "'");
    return sys_days{ymd}.time_since_epoch().count() * kDay + h * kHour + mi * kMinute + s;
}

}  // namespace bess
