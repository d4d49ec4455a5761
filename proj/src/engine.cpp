#include "bess/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "engine";

// Upper bound on twin DC throughput per unit of optimizer DC throughput at the optimizer's
// setpoints: the twin's efficiency curve differs from the constant optimizer efficiency.
double throughput_ratio_bound(const EngineSettings& s) {
    const auto& p = s.params;
    double f = 1.0;
    for (double level : power_levels(p.p_max_kw, s.solver.power_levels)) {
        if (level == 0.0) continue;
        const double x = std::abs(level) / p.p_max_kw;
        const double eta = s.twin_inverter.efficiency(x);
        f = std::max({f, eta / p.eta_inv, p.eta_inv / eta});
    }
    return f;
}

struct DayBudget {
    std::int64_t day = -1;
    double realized = 0.0;
    double predicted = 0.0;
};

}  // namespace

std::string_view to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::I: return "I";
        case ScenarioId::II: return "II";
        case ScenarioId::III: return "III";
        case ScenarioId::IV: return "IV";
    }
    return "?";
}

ScenarioId parse_scenario(std::string_view text) {
    if (text == "I" || text == "1") return ScenarioId::I;
    if (text == "II" || text == "2") return ScenarioId::II;
    if (text == "III" || text == "3") return ScenarioId::III;
    if (text == "IV" || text == "4") return ScenarioId::IV;
    throw ConfigError(kModule, "unknown scenario '" + std::string(text) + "'");
}

void ScenarioConfig::validate() const {
    const bool want_aware = id == ScenarioId::II || id == ScenarioId::IV;
    const bool want_aging = id == ScenarioId::III || id == ScenarioId::IV;
    if (heterogeneity_aware != want_aware || aging_cost_aware != want_aging) {
        throw ConfigError(kModule, "flags do not match scenario " + std::string(to_string(id)));
    }
    if (aging_cost_aware && fec_cap_per_day) throw ConfigError(kModule, "scenarios III/IV run without an FEC cap");
    if (fec_cap_per_day && !(*fec_cap_per_day >= 0.0)) throw ConfigError(kModule, "FEC cap must be nonnegative");
    if (strings.empty()) throw ConfigError(kModule, "no battery strings configured");
    if (dt <= 0 || control <= 0 || prediction <= 0 || control % dt != 0 || prediction % dt != 0) {
        throw ConfigError(kModule, "horizons must be positive multiples of dt");
    }
    if (control > prediction) throw ConfigError(kModule, "control horizon exceeds prediction horizon");
    if (!(start_soc >= 0.0 && start_soc <= 1.0)) throw ConfigError(kModule, "start SOC outside [0, 1]");
    for (const auto& s : strings) {
        StringState st = s.init;
        st.soc = start_soc;
        st.validate();
    }
}

ScenarioConfig make_scenario(ScenarioId id, std::vector<StringSpec> strings, double fec_cap_per_day) {
    ScenarioConfig sc;
    sc.id = id;
    sc.heterogeneity_aware = id == ScenarioId::II || id == ScenarioId::IV;
    sc.aging_cost_aware = id == ScenarioId::III || id == ScenarioId::IV;
    if (!sc.aging_cost_aware) sc.fec_cap_per_day = fec_cap_per_day;
    sc.strings = std::move(strings);
    return sc;
}

std::vector<StringSpec> default_strings() {
    StringState aged;
    aged.q_loss_cal = 0.04;
    aged.q_loss_cyc = 0.06;
    aged.r_incr = 1.2;
    return {StringSpec{"A", StringState{}}, StringSpec{"B", aged}};
}

std::vector<StringState> scenario_view(const ScenarioConfig& scenario, std::span<const StringState> true_states) {
    std::vector<StringState> out(true_states.begin(), true_states.end());
    if (scenario.heterogeneity_aware) return out;
    for (auto& s : out) s = StringState{s.soc, 0.0, 0.0, 1.0, 0.0};
    return out;
}

RunLog run_rolling_horizon(const ScenarioConfig& scenario, const EngineSettings& settings, const PriceSeries& prices,
                           Seconds span) {
    scenario.validate();
    settings.params.validate();
    settings.twin_inverter.validate();
    const Seconds dt = scenario.dt;
    const Seconds start = prices.grid.start;
    const TimeGrid run_grid = build_time_grid(start, span, dt);
    const std::int64_t horizon_steps = scenario.prediction / dt;
    const TimeGrid price_grid = build_time_grid(start, span + scenario.prediction, dt);
    const PriceSeries truth = resample_zoh(prices, price_grid);

    const std::size_t n_str = scenario.strings.size();
    std::vector<StringState> states;
    RunLog log;
    log.scenario = std::string(to_string(scenario.id));
    log.seed = settings.seed;
    log.config_hash = settings.config_hash;
    log.start = start;
    log.dt = dt;
    for (const auto& s : scenario.strings) {
        StringState st = s.init;
        st.soc = scenario.start_soc;
        states.push_back(st);
        log.strings.push_back(StringLog{s.name, st, st, {}, {}});
        log.strings.back().steps.reserve(static_cast<std::size_t>(run_grid.n_steps));
    }

    const ObjectiveMode mode =
        scenario.aging_cost_aware ? ObjectiveMode::market_plus_aging : ObjectiveMode::market_only;
    const double ratio_bound = throughput_ratio_bound(settings);
    std::vector<DayBudget> budget(n_str);

    const std::int64_t control_steps = scenario.control / dt;
    for (std::int64_t offset = 0; offset < run_grid.n_steps; offset += control_steps) {
        const std::int64_t exec_steps = std::min(control_steps, run_grid.n_steps - offset);
        const Seconds now = run_grid.time_at(offset);
        PriceSeries horizon = truth.slice(offset, horizon_steps);
        if (settings.forecast) horizon = resample_zoh(settings.forecast(horizon, now), horizon.grid);

        const std::int64_t day = (now - start) / kDay;
        for (auto& b : budget) {
            if (b.day != day) b = DayBudget{day, 0.0, 0.0};
        }

        const std::vector<StringState> believed = scenario_view(scenario, states);
        // Scenarios I/III plan one pseudo-string at the mean measured SOC and share the schedule.
        std::vector<StringState> plan_states;
        if (scenario.heterogeneity_aware) {
            plan_states = believed;
        } else {
            StringState pseudo = believed.front();
            double soc_sum = 0.0;
            for (const auto& b : believed) soc_sum += b.soc;
            pseudo.soc = soc_sum / static_cast<double>(n_str);
            plan_states = {pseudo};
        }

        auto budget_for = [&](std::size_t s, const StringState& plan_state) {
            const double cap = *scenario.fec_cap_per_day;
            const double prorata = cap * static_cast<double>(scenario.prediction) / static_cast<double>(kDay);
            const double q_ratio = states[s].soh() / plan_state.soh();
            const double realized_room = std::max(0.0, cap - budget[s].realized) * q_ratio / ratio_bound;
            const double predicted_room = std::max(0.0, cap - budget[s].predicted);
            return std::min({prorata, realized_room, predicted_room});
        };

        std::vector<DispatchSchedule> plans;
        for (std::size_t k = 0; k < plan_states.size(); ++k) {
            ProblemCaps caps;
            caps.c_aging = settings.c_aging;
            if (scenario.fec_cap_per_day) {
                caps.fec_cap_per_day = scenario.fec_cap_per_day;
                double b = std::numeric_limits<double>::infinity();
                if (scenario.heterogeneity_aware) {
                    b = budget_for(k, plan_states[k]);
                } else {
                    for (std::size_t s = 0; s < n_str; ++s) b = std::min(b, budget_for(s, plan_states[k]));
                }
                caps.fec_budget = b;
            }
            const HorizonProblem pb = assemble_problem(plan_states[k], horizon, mode, settings.params, caps);
            plans.push_back(solve_horizon(pb, settings.solver));
        }

        const TimeGrid exec_grid = run_grid.slice(offset, exec_steps);
        for (std::size_t s = 0; s < n_str; ++s) {
            const DispatchSchedule& plan = plans[scenario.heterogeneity_aware ? s : 0];
            const std::span<const double> slice(plan.p_ac.data(), static_cast<std::size_t>(exec_steps));
            const WindowResult wr = simulate_window(states[s], slice, settings.params, settings.twin_inverter, exec_grid);

            StringLog& sl = log.strings[s];
            for (std::int64_t k = 0; k < exec_steps; ++k) {
                const StepResult& st = wr.steps[static_cast<std::size_t>(k)];
                sl.steps.push_back(StepRecord{exec_grid.time_at(k), truth.prices[static_cast<std::size_t>(offset + k)],
                                              st.p_ac_requested, st.p_ac_realized, st.soc_after, st.v, st.i,
                                              st.clip_reason});
            }
            double planned_fec = 0.0;
            for (std::int64_t k = 0; k < exec_steps; ++k) planned_fec += plan.predicted_step_fec[static_cast<std::size_t>(k)];
            const std::size_t plan_index = scenario.heterogeneity_aware ? s : 0;
            sl.windows.push_back(WindowRecord{log.windows_run, now, exec_steps, plan_states[plan_index].soh(), planned_fec,
                                              wr.dq_cal, wr.dq_cyc, wr.dfec, wr.state_after.soh(), wr.state_after.r_incr});
            budget[s].realized += wr.dfec;
            budget[s].predicted += planned_fec;
            states[s] = wr.state_after;
            sl.final_state = states[s];
        }
        ++log.windows_run;

        for (std::size_t s = 0; s < n_str; ++s) {
            if (!(states[s].soh() > settings.params.eol)) {
                log.expired = true;
                log.expiry_note = "string " + scenario.strings[s].name + " reached end of life at " +
                                  format_utc(run_grid.time_at(offset + exec_steps));
            }
        }
        if (log.expired) break;
    }
    return log;
}

std::vector<RunLog> run_comparison(std::span<const ScenarioConfig> scenarios, const EngineSettings& settings,
                                   const PriceSeries& prices, Seconds span) {
    std::vector<RunLog> out;
    out.reserve(scenarios.size());
    for (const auto& sc : scenarios) out.push_back(run_rolling_horizon(sc, settings, prices, span));
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_run_log(const RunLog& log, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw IngestionError(kModule, "cannot write " + (dir / name).string());
        return out;
    };

    for (const auto& sl : log.strings) {
        auto out = open("string_" + sl.name + ".csv");
        out << "step,time,price_eur_mwh,planned_kw,realized_kw,soc,voltage_v,current_a,clip\n";
        for (std::size_t k = 0; k < sl.steps.size(); ++k) {
            const auto& r = sl.steps[k];
            out << k << ',' << format_utc(r.time) << ',' << format_number(r.price) << ',' << format_number(r.planned_kw)
                << ',' << format_number(r.realized_kw) << ',' << format_number(r.soc) << ','
                << format_number(r.voltage) << ',' << format_number(r.current) << ',' << to_string(r.clip) << '\n';
        }
    }

    auto win = open("windows.csv");
    win << "window,string,start,steps,believed_soh,planned_fec,dq_cal,dq_cyc,dfec,soh_after,r_incr_after\n";
    for (std::size_t w = 0; w < static_cast<std::size_t>(log.windows_run); ++w) {
        for (const auto& sl : log.strings) {
            if (w >= sl.windows.size()) continue;
            const auto& r = sl.windows[w];
            win << r.index << ',' << sl.name << ',' << format_utc(r.start) << ',' << r.steps << ','
                << format_number(r.believed_soh) << ',' << format_number(r.planned_fec) << ','
                << format_number(r.dq_cal) << ',' << format_number(r.dq_cyc) << ',' << format_number(r.dfec) << ','
                << format_number(r.soh_after) << ',' << format_number(r.r_incr_after) << '\n';
        }
    }

    auto state_json = [](const StringState& s) {
        return nlohmann::json{{"soc", s.soc},         {"q_loss_cal", s.q_loss_cal}, {"q_loss_cyc", s.q_loss_cyc},
                              {"r_incr", s.r_incr},   {"fec_total", s.fec_total},   {"soh", s.soh()}};
    };
    nlohmann::json meta;
    meta["schema"] = "bess-runlog/1";
    meta["scenario"] = log.scenario;
    meta["seed"] = log.seed;
    meta["config_hash"] = log.config_hash;
    meta["start"] = format_utc(log.start);
    meta["dt_s"] = log.dt;
    meta["windows"] = log.windows_run;
    meta["expired"] = log.expired;
    meta["expiry_note"] = log.expiry_note;
    for (const auto& sl : log.strings) {
        meta["strings"].push_back({{"name", sl.name},
                                   {"steps", sl.steps.size()},
                                   {"initial", state_json(sl.initial)},
                                   {"final", state_json(sl.final_state)}});
    }
    open("metadata.json") << meta.dump(2) << '\n';
}

}  // namespace bess
