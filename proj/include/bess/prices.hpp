#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bess/core.hpp"

namespace bess {

// Two-column text (ISO-8601 UTC timestamp, EUR/MWh), optional header, ',' or ';' separated.
// Rows must be strictly increasing; the result is resampled onto a dt grid by zero-order hold.
PriceSeries load_prices(const std::filesystem::path& path, Seconds dt = 5 * kMinute);
PriceSeries parse_prices(const std::string& text, const std::string& source_name, Seconds dt = 5 * kMinute);

struct SyntheticPriceSpec {
    std::uint64_t seed = 42;
    int days = 1;
    double base = 80.0;
    double daily_amplitude = 40.0;
    double noise_sd = 10.0;
    Seconds start = 1609459200;  // 2021-01-01T00:00:00Z
    Seconds resolution = 15 * kMinute;  // one noise draw per product interval
};

// Daily wave with its trough at 03:00 and peak at 19:00 plus seeded Gaussian noise,
// held on a dt grid.
PriceSeries gen_synthetic_prices(const SyntheticPriceSpec& spec, Seconds dt = 5 * kMinute);

std::string prices_to_csv(const PriceSeries& prices);

}  // namespace bess
