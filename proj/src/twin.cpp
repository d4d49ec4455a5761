#include "bess/twin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "twin";

struct Bound {
    double value;
    ClipReason reason;
};

// Current that realizes AC power p_ac, or the max-power current if the request is beyond reach.
double current_for_ac(double p_ac_kw, double ocv_v, double r, const InverterModel& inv, double p_rated) {
    const double p_dc_w = inverter_dc_from_ac(p_ac_kw, inv, p_rated) * 1000.0;
    if (p_dc_w < 0.0 && -p_dc_w >= max_discharge_power_w(ocv_v, r)) return -ocv_v / (2.0 * r);
    return current_from_dc_power(ocv_v, r, p_dc_w);
}
}  // namespace

std::string_view to_string(ClipReason reason) {
    switch (reason) {
        case ClipReason::none: return "none";
        case ClipReason::power: return "power";
        case ClipReason::current: return "current";
        case ClipReason::voltage: return "voltage";
        case ClipReason::soc: return "soc";
    }
    return "unknown";
}

StepResult execute_step(const StringState& state, const CellModelParams& params, const InverterModel& inverter,
                        double p_ac_kw, Seconds dt) {
    if (!std::isfinite(p_ac_kw)) throw SetpointError(kModule, "non-finite setpoint");
    StepResult out;
    out.p_ac_requested = p_ac_kw;
    const double soh = state.soh();
    const double r = effective_resistance(params.r0_ohm, state.r_incr);
    const double ocv_v = ocv(std::clamp(state.soc, 0.0, 1.0), params.ocv_curve);
    const double charge_ah = params.capacity_ah() * soh;
    const double dt_h = to_hours(dt);
    const double p_req = std::clamp(p_ac_kw, -params.p_max_kw, params.p_max_kw);

    out.soc_after = state.soc;
    out.v = ocv_v;
    if (p_ac_kw == 0.0) return out;

    const double i_req = current_for_ac(p_req, ocv_v, r, inverter, params.p_max_kw);

    // Intersect all limits as a current interval, tightening in priority order.
    Bound lo{-std::numeric_limits<double>::infinity(), ClipReason::none};
    Bound hi{std::numeric_limits<double>::infinity(), ClipReason::none};
    auto tighten = [&](double l, double h, ClipReason why) {
        if (l > lo.value) lo = {l, why};
        if (h < hi.value) hi = {h, why};
    };
    tighten(current_for_ac(-params.p_max_kw, ocv_v, r, inverter, params.p_max_kw),
            current_for_ac(params.p_max_kw, ocv_v, r, inverter, params.p_max_kw), ClipReason::power);
    tighten(-params.i_max_a, params.i_max_a, ClipReason::current);
    if (r > 0.0) tighten((params.v_min - ocv_v) / r, (params.v_max - ocv_v) / r, ClipReason::voltage);
    tighten((params.soc_min - state.soc) * charge_ah / dt_h, (params.soc_max - state.soc) * charge_ah / dt_h,
            ClipReason::soc);
    // Realized power keeps the requested sign and never exceeds it.
    if (i_req > 0.0) lo.value = std::max(lo.value, 0.0);
    else hi.value = std::min(hi.value, 0.0);

    double i = i_req;
    ClipReason reason = p_req != p_ac_kw ? ClipReason::power : ClipReason::none;
    if (lo.value > hi.value) {
        i = 0.0;
        reason = i_req > 0.0 ? hi.reason : lo.reason;
    } else if (i > hi.value) {
        i = hi.value;
        reason = hi.reason;
    } else if (i < lo.value) {
        i = lo.value;
        reason = lo.reason;
    }
    if (reason == ClipReason::none && p_req != p_ac_kw) reason = ClipReason::power;

    const double v = terminal_voltage(ocv_v, r, i);
    out.i = i;
    out.v = v;
    out.p_dc = v * i / 1000.0;
    out.clip_reason = reason;
    out.p_ac_realized = reason == ClipReason::none ? p_ac_kw : inverter_ac_from_dc(out.p_dc, inverter, params.p_max_kw);
    if (reason != ClipReason::none) {
        // The inverse inverter may round slightly beyond the request; never report more than asked.
        out.p_ac_realized = p_ac_kw > 0.0 ? std::clamp(out.p_ac_realized, 0.0, p_ac_kw)
                                          : std::clamp(out.p_ac_realized, p_ac_kw, 0.0);
        if (out.p_ac_realized == 0.0) {
            out.i = 0.0;
            out.v = ocv_v;
            out.p_dc = 0.0;
        }
    }
    out.soc_after = state.soc + out.i * dt_h / charge_ah;
    return out;
}

WindowResult simulate_window(const StringState& state, std::span<const double> schedule_kw,
                             const CellModelParams& params, const InverterModel& inverter, const TimeGrid& grid) {
    if (static_cast<std::int64_t>(schedule_kw.size()) != grid.n_steps) {
        throw DomainError(kModule, "schedule length does not match the window grid");
    }
    WindowResult out;
    out.steps.reserve(schedule_kw.size());
    std::vector<double> soc{state.soc};
    std::vector<double> cur, volt;
    soc.reserve(schedule_kw.size() + 1);
    cur.reserve(schedule_kw.size());
    volt.reserve(schedule_kw.size());

    StringState running = state;
    double q_cal = state.q_loss_cal;
    for (double p : schedule_kw) {
        StepResult step = execute_step(running, params, inverter, p, grid.dt);
        running.soc = step.soc_after;
        const double dq = calendar_loss_step(std::clamp(step.soc_after, 0.0, 1.0), q_cal, grid.dt_hours(), params);
        q_cal += dq;
        out.dq_cal += dq;
        soc.push_back(step.soc_after);
        cur.push_back(step.i);
        volt.push_back(step.v);
        out.steps.push_back(step);
    }

    const double soh = state.soh();
    const CycleBasis basis{params.q_nom_kwh * soh, params.capacity_ah() * soh, 0.01 * params.i_max_a};
    out.stats = cycle_stats(soc, cur, volt, grid, basis);
    out.dfec = out.stats.delta_fec;
    out.dq_cyc = cyclic_loss(out.stats, state.q_loss_cyc, params);
    StringState aged = apply_aging(state, out.dq_cal, out.dq_cyc, out.dfec, params.k_r);
    aged.soc = running.soc;
    out.state_after = aged;
    return out;
}

}  // namespace bess
