#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace bess {

// Piecewise-linear open-circuit voltage of a whole string as a function of SOC.
class OcvCurve {
public:
    struct Point {
        double soc;
        double volts;
    };

    OcvCurve() = default;
    explicit OcvCurve(std::vector<Point> points);

    double voltage(double soc) const;
    // Mean OCV over SOC in [0, 1]; converts energy capacity to charge capacity.
    double mean_voltage() const;
    // Integral of OCV over SOC from 0 to soc (V per unit SOC); times Ah gives Wh.
    double integral(double soc) const;
    std::span<const Point> points() const { return points_; }
    double min_voltage() const { return points_.front().volts; }
    double max_voltage() const { return points_.back().volts; }

    // Two columns (soc, volts); '#' comments and a non-numeric header line are skipped.
    static OcvCurve load(const std::filesystem::path& path);
    // 21-point LFP-shaped table for an aggregated string (flat plateau, steep ends).
    static OcvCurve lfp_default();

private:
    std::vector<Point> points_;
};

double ocv(double soc, const OcvCurve& curve);

double effective_resistance(double r0, double r_incr);

// Charging current is positive and raises the terminal voltage.
inline double terminal_voltage(double ocv, double r, double i) { return ocv + r * i; }

// Physical root of r*i^2 + ocv*i - p_dc = 0 (p_dc in W). Throws InfeasiblePowerError when the
// discriminant is not positive.
double current_from_dc_power(double ocv, double r, double p_dc_w);

// Largest discharge power (W, as a positive number) the cell can deliver at this OCV and resistance.
inline double max_discharge_power_w(double ocv, double r) { return r > 0.0 ? ocv * ocv / (4.0 * r) : 1e300; }

struct InverterModel {
    enum class Mode { constant, curve };

    Mode mode = Mode::constant;
    double eta_const = 0.95;
    // Curve mode: eta(x) = x / (x + p0 + k x^2), x = |p_ac| / p_rated.
    double p0 = 0.005;
    double k = 0.03;

    static InverterModel constant(double eta) { return InverterModel{Mode::constant, eta, 0.0, 0.0}; }
    static InverterModel curve(double p0, double k) { return InverterModel{Mode::curve, 1.0, p0, k}; }

    double efficiency(double load_fraction) const;
    void validate() const;
};

// AC setpoint (kW, + = charge) to DC power at the battery terminals (kW).
double inverter_dc_from_ac(double p_ac_kw, const InverterModel& model, double p_rated_kw);
// Inverse of inverter_dc_from_ac. Discharge requests below the standing loss map to 0.
double inverter_ac_from_dc(double p_dc_kw, const InverterModel& model, double p_rated_kw);

}  // namespace bess
