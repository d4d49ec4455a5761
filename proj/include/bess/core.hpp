#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bess {

// Integer seconds since the Unix epoch (UTC). All time arithmetic is integral.
using Seconds = std::int64_t;

inline constexpr Seconds kMinute = 60;
inline constexpr Seconds kHour = 3600;
inline constexpr Seconds kDay = 24 * kHour;

inline double to_hours(Seconds s) { return static_cast<double>(s) / static_cast<double>(kHour); }

// Uniform time grid: step k covers [start + k*dt, start + (k+1)*dt).
struct TimeGrid {
    Seconds start = 0;
    Seconds dt = 5 * kMinute;
    std::int64_t n_steps = 1;

    Seconds span() const { return dt * n_steps; }
    Seconds end() const { return start + span(); }
    Seconds time_at(std::int64_t k) const { return start + k * dt; }
    double dt_hours() const { return to_hours(dt); }

    // Sub-grid of `count` steps beginning at step `offset`.
    TimeGrid slice(std::int64_t offset, std::int64_t count) const;

    bool operator==(const TimeGrid&) const = default;
};

TimeGrid build_time_grid(Seconds start, Seconds span, Seconds dt);

// Intraday prices in EUR/MWh, one per grid step.
struct PriceSeries {
    TimeGrid grid;
    std::vector<double> prices;

    PriceSeries() = default;
    PriceSeries(TimeGrid g, std::vector<double> p);

    PriceSeries slice(std::int64_t offset, std::int64_t count) const;
    double mean() const;
};

// Zero-order hold onto `target`. The source must cover the whole target span.
PriceSeries resample_zoh(const PriceSeries& series, const TimeGrid& target);

// Zero-order hold from irregular sample times. Sample k holds until times[k+1];
// the last sample holds until `source_end`.
PriceSeries resample_zoh(std::span<const Seconds> times, std::span<const double> values,
                         Seconds source_end, const TimeGrid& target);

// True or believed condition of one battery string. SOH is derived, never stored.
struct StringState {
    double soc = 0.5;
    double q_loss_cal = 0.0;
    double q_loss_cyc = 0.0;
    double r_incr = 1.0;
    double fec_total = 0.0;

    double soh() const { return 1.0 - q_loss_cal - q_loss_cyc; }
    void validate() const;

    bool operator==(const StringState&) const = default;
};

std::string format_utc(Seconds t);
// Parses "YYYY-MM-DDTHH:MM[:SS][Z|+00:00]" or "YYYY-MM-DD HH:MM[:SS]". Throws IngestionError.
Seconds parse_utc(const std::string& text);

}  // namespace bess
