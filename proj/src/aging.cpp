#include "bess/aging.hpp"

#include <algorithm>
#include <cmath>

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "aging";
}

double calendar_stress(double soc, const CellModelParams& p) {
    const double d = soc - 0.5;
    return (p.c1 * d * d * d + p.d1) * p.k_temp;
}

double cyclic_stress(double c_rate, double doc, const CellModelParams& p) {
    const double d = doc - 0.6;
    return (p.a2 * c_rate + p.b2) * (p.c2 * d * d * d + p.d2);
}

double calendar_loss_step(double soc, double q_acc_cal, double dt_hours, const CellModelParams& p) {
    if (!(soc >= 0.0 && soc <= 1.0)) throw DomainError(kModule, "SOC outside [0, 1]");
    if (!(dt_hours > 0.0)) throw DomainError(kModule, "time step must be positive");
    const double s = calendar_stress(soc, p);
    return std::max(0.0, s * s / (2.0 * std::max(q_acc_cal, p.q_floor)) * dt_hours);
}

double cyclic_loss(const CycleStats& stats, double q_acc_cyc, const CellModelParams& p) {
    if (stats.delta_fec <= 0.0) return 0.0;
    const double s = cyclic_stress(stats.c_rate, stats.doc, p);
    return std::max(0.0, s * s / (2.0 * std::max(q_acc_cyc, p.q_floor)) * stats.delta_fec);
}

std::vector<double> turning_points(std::span<const double> soc) {
    std::vector<double> tp;
    for (double s : soc) {
        if (!tp.empty() && s == tp.back()) continue;
        // Drop the middle of three points that are monotone.
        if (tp.size() >= 2) {
            const double a = tp[tp.size() - 2], b = tp.back();
            if ((b - a) * (s - b) > 0.0) tp.back() = s;
            else tp.push_back(s);
        } else {
            tp.push_back(s);
        }
    }
    return tp;
}

CycleStats cycle_stats(std::span<const double> soc, std::span<const double> current_a,
                       std::span<const double> voltage_v, const TimeGrid& grid, const CycleBasis& basis) {
    const auto n = static_cast<std::size_t>(grid.n_steps);
    if (current_a.size() != n || voltage_v.size() != n || soc.size() != n + 1) {
        throw DomainError(kModule, "trajectory lengths do not match the grid");
    }
    CycleStats out;
    const double dt_h = grid.dt_hours();
    double throughput_kwh = 0.0;
    double active_sum = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < n; ++k) {
        throughput_kwh += std::abs(current_a[k] * voltage_v[k]) * dt_h / 1000.0;
        if (std::abs(current_a[k]) > basis.active_current_a) {
            active_sum += std::abs(current_a[k]);
            ++active;
        }
    }
    if (throughput_kwh <= 0.0) return out;
    out.delta_fec = throughput_kwh / (2.0 * basis.q_act_kwh);
    if (active > 0 && basis.capacity_ah > 0.0) out.c_rate = active_sum / static_cast<double>(active) / basis.capacity_ah;

    const auto tp = turning_points(soc);
    double sum_d = 0.0, sum_d2 = 0.0;
    for (std::size_t k = 1; k < tp.size(); ++k) {
        const double d = std::abs(tp[k] - tp[k - 1]);
        sum_d += d;
        sum_d2 += d * d;
    }
    out.doc = sum_d > 0.0 ? std::clamp(sum_d2 / sum_d, 0.0, 1.0) : 0.0;
    return out;
}

double resistance_growth(const StringState& state, double k_r) {
    return std::max(state.r_incr, 1.0 + k_r * (state.q_loss_cal + state.q_loss_cyc));
}

StringState apply_aging(const StringState& state, double dq_cal, double dq_cyc, double dfec, double k_r) {
    if (!(dq_cal >= 0.0 && dq_cyc >= 0.0 && dfec >= 0.0)) throw DomainError(kModule, "negative aging increment");
    StringState next = state;
    next.q_loss_cal += dq_cal;
    next.q_loss_cyc += dq_cyc;
    next.fec_total += dfec;
    if (!(next.soh() > 0.0)) throw BatteryExpiredError(kModule, "accumulated losses exhaust the string capacity");
    next.r_incr = resistance_growth(next, k_r);
    return next;
}

}  // namespace bess
