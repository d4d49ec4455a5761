#include "bess/prices.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "bess/engine.hpp"
#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "cli";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

// Phase of the daily wave: -pi/2 at 03:00 rising to +pi/2 at 19:00, falling back by 03:00.
double daily_phase(double hour_of_day) {
    constexpr double pi = std::numbers::pi;
    double h = std::fmod(hour_of_day - 3.0 + 24.0, 24.0);
    if (h <= 16.0) return -pi / 2.0 + pi * h / 16.0;
    return pi / 2.0 + pi * (h - 16.0) / 8.0;
}
}  // namespace

PriceSeries parse_prices(const std::string& text, const std::string& source, Seconds dt) {
    std::istringstream in(text);
    std::vector<Seconds> times;
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    bool seen_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto sep = body.find_first_of(",;");
        const std::string where = source + ":" + std::to_string(line_no);
        if (sep == std::string::npos) throw IngestionError(kModule, where + ": expected two columns");
        const std::string ts = trim(body.substr(0, sep));
        const std::string val = trim(body.substr(sep + 1));
        Seconds t = 0;
        try {
            t = parse_utc(ts);
        } catch (const IngestionError&) {
            if (!seen_row) {  // header
                seen_row = true;
                continue;
            }
            throw IngestionError(kModule, where + ": unparseable timestamp '" + ts + "'");
        }
        seen_row = true;
        double price = 0.0;
        try {
            std::size_t used = 0;
            price = std::stod(val, &used);
            if (trim(val.substr(used)).size() != 0) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw IngestionError(kModule, where + ": unparseable price '" + val + "'");
        }
        if (!std::isfinite(price)) throw IngestionError(kModule, where + ": non-finite price '" + val + "'");
        if (!times.empty() && t <= times.back()) {
            throw IngestionError(kModule, where + ": timestamp " + ts + " is not after the previous row");
        }
        times.push_back(t);
        values.push_back(price);
    }
    if (times.empty()) throw IngestionError(kModule, source + ": no price rows");
    if (times.size() < 2) throw IngestionError(kModule, source + ": need at least two rows to infer the interval");

    Seconds interval = times[1] - times[0];
    for (std::size_t k = 1; k < times.size(); ++k) interval = std::min(interval, times[k] - times[k - 1]);
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] - times[k - 1] > interval) {
            throw IngestionError(kModule, source + ": no prices for [" + format_utc(times[k - 1] + interval) + ", " +
                                              format_utc(times[k]) + ")");
        }
    }
    const Seconds end = times.back() + interval;
    const Seconds span = (end - times.front()) / dt * dt;
    if (span <= 0) throw IngestionError(kModule, source + ": data shorter than one time step");
    return resample_zoh(times, values, end, build_time_grid(times.front(), span, dt));
}

PriceSeries load_prices(const std::filesystem::path& path, Seconds dt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError(kModule, "cannot open price file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_prices(buf.str(), path.string(), dt);
}

PriceSeries gen_synthetic_prices(const SyntheticPriceSpec& spec, Seconds dt) {
    if (spec.days < 1) throw ConfigError(kModule, "synthetic prices need at least one day");
    if (spec.resolution <= 0 || spec.resolution % dt != 0) {
        throw ConfigError(kModule, "price resolution must be a positive multiple of dt");
    }
    if (!(spec.noise_sd >= 0.0)) throw ConfigError(kModule, "noise_sd must be nonnegative");
    const Seconds span = spec.days * kDay;
    const TimeGrid coarse = build_time_grid(spec.start, span, spec.resolution);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> p(static_cast<std::size_t>(coarse.n_steps));
    for (std::int64_t k = 0; k < coarse.n_steps; ++k) {
        const Seconds t = coarse.time_at(k);
        const double hour = static_cast<double>(((t % kDay) + kDay) % kDay) / static_cast<double>(kHour);
        const double z = noise(rng);
        p[static_cast<std::size_t>(k)] = spec.base + spec.daily_amplitude * std::sin(daily_phase(hour)) + spec.noise_sd * z;
    }
    return resample_zoh(PriceSeries(coarse, std::move(p)), build_time_grid(spec.start, span, dt));
}

std::string prices_to_csv(const PriceSeries& prices) {
    std::ostringstream out;
    out << "timestamp,price_eur_mwh\n";
    for (std::int64_t k = 0; k < prices.grid.n_steps; ++k) {
        out << format_utc(prices.grid.time_at(k)) << ',' << format_number(prices.prices[static_cast<std::size_t>(k)])
            << '\n';
    }
    return out.str();
}

}  // namespace bess
