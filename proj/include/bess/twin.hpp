#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bess/aging.hpp"
#include "bess/core.hpp"
#include "bess/ecm.hpp"
#include "bess/params.hpp"

namespace bess {

// Constraint that limited a realized setpoint. Listed in resolution priority.
enum class ClipReason { none, power, current, voltage, soc };

std::string_view to_string(ClipReason reason);

struct StepResult {
    double p_ac_requested = 0.0;  // kW
    double p_ac_realized = 0.0;   // kW
    double p_dc = 0.0;            // kW, realized
    double soc_after = 0.0;
    double v = 0.0;
    double i = 0.0;
    ClipReason clip_reason = ClipReason::none;
};

struct WindowResult {
    std::vector<StepResult> steps;
    double dq_cal = 0.0;
    double dq_cyc = 0.0;
    double dfec = 0.0;
    CycleStats stats;
    StringState state_after;
};

// Executes one AC setpoint against the true string state. SOC advances with the state's
// current SOH as capacity scale.
StepResult execute_step(const StringState& state, const CellModelParams& params, const InverterModel& inverter,
                        double p_ac_kw, Seconds dt);

// Runs a schedule over `grid`: calendar loss per step, cyclic loss once for the window.
WindowResult simulate_window(const StringState& state, std::span<const double> schedule_kw,
                             const CellModelParams& params, const InverterModel& inverter, const TimeGrid& grid);

}  // namespace bess
