#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bess/dispatch.hpp"
#include "bess/engine.hpp"
#include "bess/metrics.hpp"
#include "bess/params.hpp"
#include "bess/prices.hpp"

namespace bess {

// Everything a batch run needs. Documented key by key in docs/config.md; unknown keys are errors.
struct RunConfig {
    std::vector<ScenarioId> scenarios{ScenarioId::I};
    std::optional<std::filesystem::path> prices_path;  // synthetic prices when empty
    SyntheticPriceSpec synthetic;
    std::filesystem::path output_dir = "bess_out";
    double span_days = 14.0;
    std::uint64_t seed = 42;
    Seconds start = 1609459200;  // 2021-01-01T00:00:00Z, used for synthetic prices
    double prediction_h = 12.0;
    double control_h = 4.0;
    double dt_min = 5.0;
    double start_soc = 0.5;
    double fec_cap_per_day = 2.0;
    double c_aging = 200.0;
    std::optional<std::filesystem::path> ocv_table;
    CellModelParams cell = default_cell_params();
    InverterModel twin_inverter = InverterModel::curve(0.005, 0.03);
    SolverConfig solver;
    std::vector<StringSpec> strings = default_strings();
    MismatchMode mismatch = MismatchMode::absolute;

    Seconds dt() const;
    Seconds span() const;
    void validate() const;
};

// Parses a JSON document on top of the defaults. Throws ConfigError naming any unknown key.
RunConfig parse_run_config(std::string_view json_text, const RunConfig& base = RunConfig{});
RunConfig load_run_config(const std::filesystem::path& path);
// Applies "dotted.key=value" overrides; value is JSON, or a bare string.
RunConfig apply_overrides(const RunConfig& config, const std::vector<std::string>& assignments);

std::string effective_config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

ScenarioConfig scenario_from_config(const RunConfig& config, ScenarioId id);
EngineSettings engine_settings(const RunConfig& config);
// Loads or generates prices covering span plus one prediction horizon.
PriceSeries prices_for(const RunConfig& config);

}  // namespace bess
