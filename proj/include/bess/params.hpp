#pragma once

#include "bess/ecm.hpp"

namespace bess {

// Electrical and aging constants of one string. The aging fit constants below are
// calibration fixtures (a continuously cycled fresh string loses roughly 2-3 % SOH per
// year at 1 FEC/day), not values from a particular cell study.
struct CellModelParams {
    double q_nom_kwh = 80.0;
    double p_max_kw = 80.0;
    double i_max_a = 115.0;
    double v_min = 0.0;
    double v_max = 0.0;
    double soc_min = 0.1;
    double soc_max = 0.9;
    double r0_ohm = 0.15;
    OcvCurve ocv_curve;

    // Calendar stress (c1 (soc - 0.5)^3 + d1) * k_temp, per sqrt(hour).
    double c1 = 4.0;
    double d1 = 1.0;
    double k_temp = 2.2e-4;
    // Cyclic stress (a2 C + b2) (c2 (doc - 0.6)^3 + d2), per sqrt(FEC).
    double a2 = 2.5e-5;
    double b2 = 3.5e-5;
    double c2 = 4.0;
    double d2 = 1.0;

    double eta_inv = 0.95;
    double eol = 0.8;
    // Denominator floor for the square-root laws on a fresh string.
    double q_floor = 1e-4;
    // Resistance growth per unit of total capacity loss.
    double k_r = 2.0;

    double nominal_voltage() const { return ocv_curve.mean_voltage(); }
    double capacity_ah() const { return q_nom_kwh * 1000.0 / nominal_voltage(); }
    void validate() const;
};

// Defaults for an 80 kW / 80 kWh LFP string. Voltage limits sit at the OCV endpoints
// widened by r0 * i_max; i_max leaves a small margin over the current needed for rated
// discharge at soc_min.
CellModelParams default_cell_params();

}  // namespace bess
