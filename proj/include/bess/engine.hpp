#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bess/core.hpp"
#include "bess/dispatch.hpp"
#include "bess/params.hpp"
#include "bess/twin.hpp"

namespace bess {

enum class ScenarioId { I, II, III, IV };

std::string_view to_string(ScenarioId id);
ScenarioId parse_scenario(std::string_view text);

struct StringSpec {
    std::string name;
    StringState init;  // soc is replaced by the scenario start SOC
};

struct ScenarioConfig {
    ScenarioId id = ScenarioId::I;
    bool heterogeneity_aware = false;
    bool aging_cost_aware = false;
    std::optional<double> fec_cap_per_day;
    std::vector<StringSpec> strings;
    Seconds prediction = 12 * kHour;
    Seconds control = 4 * kHour;
    Seconds dt = 5 * kMinute;
    double start_soc = 0.5;

    void validate() const;
};

// Awareness flags of the four scenarios; the cap applies to I and II only.
ScenarioConfig make_scenario(ScenarioId id, std::vector<StringSpec> strings, double fec_cap_per_day = 2.0);

// String A new, string B aged (SOH 0.90 split 0.04 calendar / 0.06 cyclic, r_incr 1.2).
std::vector<StringSpec> default_strings();

struct EngineSettings {
    CellModelParams params = default_cell_params();
    InverterModel twin_inverter = InverterModel::curve(0.005, 0.03);
    double c_aging = 200.0;
    SolverConfig solver;
    std::uint64_t seed = 0;
    std::string config_hash;
    // Maps the true price slice to what the optimizer sees; identity when empty.
    std::function<PriceSeries(const PriceSeries& truth, Seconds now)> forecast;
};

struct StepRecord {
    Seconds time = 0;
    double price = 0.0;
    double planned_kw = 0.0;
    double realized_kw = 0.0;
    double soc = 0.0;
    double voltage = 0.0;
    double current = 0.0;
    ClipReason clip = ClipReason::none;
};

struct WindowRecord {
    int index = 0;
    Seconds start = 0;
    std::int64_t steps = 0;
    double believed_soh = 1.0;
    double planned_fec = 0.0;  // optimizer-side FEC of the executed slice
    double dq_cal = 0.0;
    double dq_cyc = 0.0;
    double dfec = 0.0;
    double soh_after = 1.0;
    double r_incr_after = 1.0;
};

struct StringLog {
    std::string name;
    StringState initial;
    StringState final_state;
    std::vector<StepRecord> steps;
    std::vector<WindowRecord> windows;
};

struct RunLog {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string config_hash;
    Seconds start = 0;
    Seconds dt = 5 * kMinute;
    std::vector<StringLog> strings;
    int windows_run = 0;
    bool expired = false;
    std::string expiry_note;
};

// Believed state per string: true states when heterogeneity-aware, fresh otherwise (SOC stays measured).
std::vector<StringState> scenario_view(const ScenarioConfig& scenario, std::span<const StringState> true_states);

RunLog run_rolling_horizon(const ScenarioConfig& scenario, const EngineSettings& settings, const PriceSeries& prices,
                           Seconds span);

std::vector<RunLog> run_comparison(std::span<const ScenarioConfig> scenarios, const EngineSettings& settings,
                                   const PriceSeries& prices, Seconds span);

// One CSV per string, windows.csv and metadata.json.
void write_run_log(const RunLog& log, const std::filesystem::path& dir);

// Shortest round-trip decimal form; used by every text output.
std::string format_number(double value);

}  // namespace bess
