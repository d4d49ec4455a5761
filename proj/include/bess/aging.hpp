#pragma once

#include <span>
#include <vector>

#include "bess/core.hpp"
#include "bess/params.hpp"

namespace bess {

struct CycleStats {
    double delta_fec = 0.0;
    double doc = 0.0;     // FEC-weighted mean half-cycle depth
    double c_rate = 0.0;  // 1/h, mean over active steps
};

// Inputs for cycle_stats that depend on the string's actual capacity.
struct CycleBasis {
    double q_act_kwh = 0.0;    // q_nom * soh
    double capacity_ah = 0.0;  // charge capacity scaled by soh
    double active_current_a = 0.0;  // steps with |i| at or below this are idle
};

double calendar_stress(double soc, const CellModelParams& params);
double cyclic_stress(double c_rate, double doc, const CellModelParams& params);

// Incremental calendar loss over dt_hours at the given SOC.
double calendar_loss_step(double soc, double q_acc_cal, double dt_hours, const CellModelParams& params);
// Incremental cyclic loss for a window summarised by `stats`.
double cyclic_loss(const CycleStats& stats, double q_acc_cyc, const CellModelParams& params);

// Local extrema of a SOC path (first and last points always kept, plateaus collapsed).
std::vector<double> turning_points(std::span<const double> soc);

// soc has n+1 entries (start plus one per step); current_a and voltage_v have n.
CycleStats cycle_stats(std::span<const double> soc, std::span<const double> current_a,
                       std::span<const double> voltage_v, const TimeGrid& grid, const CycleBasis& basis);

double resistance_growth(const StringState& state, double k_r);

// Adds the increments; r_incr follows resistance_growth. Throws BatteryExpiredError if SOH <= 0.
StringState apply_aging(const StringState& state, double dq_cal, double dq_cyc, double dfec, double k_r);

}  // namespace bess
