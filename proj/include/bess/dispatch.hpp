#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bess/aging.hpp"
#include "bess/core.hpp"
#include "bess/ecm.hpp"
#include "bess/params.hpp"

namespace bess {

enum class ObjectiveMode { market_only, market_plus_aging };

struct SolverConfig {
    int soc_nodes = 201;
    int power_levels = 41;
    double gap = 0.01;
    // Aging-aware mode: number of throughput prices scanned and their geometric spacing.
    int aging_scan_points = 32;
    double aging_scan_ratio = 1.3;
    // Local improvement sweeps on the scan winner (aging-aware mode only); 0 disables.
    int polish_sweeps = 2;
    int cap_bisection_iters = 40;
};

struct ProblemCaps {
    double c_aging = 200.0;  // EUR per kWh of lost capacity
    std::optional<double> fec_cap_per_day;
    // Absolute FEC budget for this horizon; defaults to the per-day cap pro rata.
    std::optional<double> fec_budget;
};

// One string's horizon problem as the optimizer sees it: constant inverter efficiency,
// believed SOH and resistance, static R0.
struct HorizonProblem {
    TimeGrid grid;
    std::vector<double> prices;
    StringState believed;
    CellModelParams params;
    InverterModel inverter;
    ObjectiveMode mode = ObjectiveMode::market_only;
    double c_aging = 200.0;
    std::optional<double> fec_cap_per_day;
    std::optional<double> fec_budget;

    double resistance = 0.0;
    double soh = 1.0;
    double capacity_ah = 0.0;  // believed, SOH-scaled
    double q_act_kwh = 0.0;
    double terminal_price = 0.0;  // EUR/MWh applied to energy left at the horizon end
};

HorizonProblem assemble_problem(const StringState& believed, const PriceSeries& prices, ObjectiveMode mode,
                                const CellModelParams& params, const ProblemCaps& caps);

// Monetary value of cyclic capacity loss, EUR.
double aging_cost(double dq_cyc, double c_aging, double q_nom_kwh, double eol);

// Optimizer-side transition from `soc` under AC setpoint p_ac_kw, or nullopt when any
// power, current, voltage or SOC bound is violated.
struct ModelStep {
    double soc_next;
    double current_a;
    double voltage_v;
    double p_dc_kw;
};
std::optional<ModelStep> model_step(const HorizonProblem& problem, double soc, double p_ac_kw);

struct ScheduleEvaluation {
    std::vector<double> soc;  // n+1 entries
    std::vector<double> current_a;
    std::vector<double> voltage_v;
    std::vector<double> p_dc_kw;
    CycleStats stats;
    double market_cost = 0.0;  // EUR, + = net purchase
    double dq_cyc = 0.0;
    double dq_cal = 0.0;  // reported only, never priced
    double aging_cost = 0.0;  // priced in market_plus_aging mode only
    double terminal_value = 0.0;
    double objective = 0.0;
};

// Simulates a schedule through the optimizer model; nullopt if it is infeasible.
std::optional<ScheduleEvaluation> evaluate_schedule(const HorizonProblem& problem, std::span<const double> p_ac_kw);

struct DispatchSchedule {
    std::vector<double> p_ac;           // kW per step, + = charge
    std::vector<double> predicted_soc;  // after each step
    double predicted_cost = 0.0;        // objective value, EUR
    double market_cost = 0.0;
    double predicted_dq_cyc = 0.0;
    double predicted_dq_cal = 0.0;
    double predicted_fec = 0.0;
    std::vector<double> predicted_step_fec;
};

DispatchSchedule solve_horizon(const HorizonProblem& problem, const SolverConfig& config);

// Exhaustive search over `levels` evenly spaced setpoints in [-p_max, p_max].
DispatchSchedule enumerate_optimal(const HorizonProblem& problem, int levels);

// Evenly spaced setpoints in [-p_max, p_max]; zero is always included.
std::vector<double> power_levels(double p_max_kw, int levels);

}  // namespace bess
