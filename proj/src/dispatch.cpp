#include "bess/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "dispatch";
constexpr double kInf = std::numeric_limits<double>::infinity();

double energy_cost(double price, double p_kw, double dt_h) { return price * p_kw * dt_h / 1000.0; }

// Setpoints ordered by |p| (zero first, charge before discharge) so that strict
// improvement tests prefer the smaller magnitude on ties.
std::vector<double> ordered_levels(double p_max, int levels) {
    std::vector<double> lv = power_levels(p_max, levels);
    std::stable_sort(lv.begin(), lv.end(), [](double a, double b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return a > b;
    });
    return lv;
}

struct Transition {
    bool feasible = false;
    int node = 0;     // lower interpolation node
    double weight = 0.0;
    double fec = 0.0;
};

// Node-to-action transitions; independent of time because the problem freezes SOH and R.
struct DpTables {
    std::vector<double> nodes;
    std::vector<double> levels;
    std::vector<Transition> trans;  // nodes x levels
    double step = 0.0;

    const Transition& at(std::size_t j, std::size_t k) const { return trans[j * levels.size() + k]; }
};

double fec_of(const HorizonProblem& pb, double p_dc_kw) {
    return std::abs(p_dc_kw) * pb.grid.dt_hours() / (2.0 * pb.q_act_kwh);
}

void locate(const DpTables& tab, double soc, int& node, double& weight) {
    const int n = static_cast<int>(tab.nodes.size());
    double x = (soc - tab.nodes.front()) / tab.step;
    x = std::clamp(x, 0.0, static_cast<double>(n - 1));
    node = std::min(static_cast<int>(x), n - 2);
    weight = x - node;
}

DpTables build_tables(const HorizonProblem& pb, const SolverConfig& cfg) {
    if (cfg.soc_nodes < 2) throw ConfigError(kModule, "soc_nodes must be at least 2");
    DpTables tab;
    const auto n = static_cast<std::size_t>(cfg.soc_nodes);
    const double lo = pb.params.soc_min, hi = pb.params.soc_max;
    tab.step = (hi - lo) / static_cast<double>(n - 1);
    tab.nodes.resize(n);
    for (std::size_t j = 0; j < n; ++j) tab.nodes[j] = lo + tab.step * static_cast<double>(j);
    tab.nodes.back() = hi;
    tab.levels = ordered_levels(pb.params.p_max_kw, cfg.power_levels);
    tab.trans.resize(n * tab.levels.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < tab.levels.size(); ++k) {
            Transition& tr = tab.trans[j * tab.levels.size() + k];
            auto step = model_step(pb, tab.nodes[j], tab.levels[k]);
            if (!step) continue;
            tr.feasible = true;
            tr.fec = fec_of(pb, step->p_dc_kw);
            locate(tab, step->soc_next, tr.node, tr.weight);
        }
    }
    return tab;
}

// Open-circuit energy above soc_min, sold at the mean horizon price through the inverter.
double terminal_value(const HorizonProblem& pb, double soc) {
    const OcvCurve& c = pb.params.ocv_curve;
    const double kwh = (c.integral(soc) - c.integral(pb.params.soc_min)) * pb.capacity_ah / 1000.0;
    return kwh * pb.inverter.eta_const * pb.terminal_price / 1000.0;
}

double interp(const std::vector<double>& v, int node, double w) {
    if (w == 0.0) return v[static_cast<std::size_t>(node)];
    return (1.0 - w) * v[static_cast<std::size_t>(node)] + w * v[static_cast<std::size_t>(node) + 1];
}

// Backward DP over the SOC grid, then a forward pass from the exact start SOC using the
// true optimizer model. lambda_fec prices each FEC of throughput (EUR/FEC).
std::vector<double> dp_schedule(const HorizonProblem& pb, const DpTables& tab, double lambda_fec) {
    const auto T = static_cast<std::size_t>(pb.grid.n_steps);
    const std::size_t N = tab.nodes.size();
    const std::size_t L = tab.levels.size();
    const double dt_h = pb.grid.dt_hours();

    std::vector<std::vector<double>> value(T + 1, std::vector<double>(N));
    for (std::size_t j = 0; j < N; ++j) value[T][j] = -terminal_value(pb, tab.nodes[j]);
    for (std::size_t t = T; t-- > 0;) {
        const auto& next = value[t + 1];
        auto& cur = value[t];
        const double price = pb.prices[t];
        for (std::size_t j = 0; j < N; ++j) {
            double best = kInf;
            for (std::size_t k = 0; k < L; ++k) {
                const Transition& tr = tab.at(j, k);
                if (!tr.feasible) continue;
                const double c = energy_cost(price, tab.levels[k], dt_h) + lambda_fec * tr.fec + interp(next, tr.node, tr.weight);
                if (c < best - 1e-12) best = c;
            }
            cur[j] = best;
        }
    }

    std::vector<double> schedule(T, 0.0);
    double soc = pb.believed.soc;
    for (std::size_t t = 0; t < T; ++t) {
        double best = kInf;
        double best_p = 0.0;
        double best_soc = soc;
        for (std::size_t k = 0; k < L; ++k) {
            auto step = model_step(pb, soc, tab.levels[k]);
            if (!step) continue;
            int node = 0;
            double w = 0.0;
            locate(tab, step->soc_next, node, w);
            const double c = energy_cost(pb.prices[t], tab.levels[k], dt_h) + lambda_fec * fec_of(pb, step->p_dc_kw) +
                             interp(value[t + 1], node, w);
            if (c < best - 1e-12) {
                best = c;
                best_p = tab.levels[k];
                best_soc = step->soc_next;
            }
        }
        schedule[t] = best_p;
        soc = best_soc;
    }
    return schedule;
}

struct Candidate {
    std::vector<double> p;
    ScheduleEvaluation eval;
};

Candidate make_candidate(const HorizonProblem& pb, std::vector<double> p) {
    auto ev = evaluate_schedule(pb, p);
    if (!ev) throw InternalError(kModule, "solver produced a schedule its own model rejects");
    return Candidate{std::move(p), std::move(*ev)};
}

bool better(const Candidate& a, const Candidate& b) { return a.eval.objective < b.eval.objective - 1e-12; }

DispatchSchedule to_schedule(const HorizonProblem& pb, const Candidate& c) {
    DispatchSchedule s;
    s.p_ac = c.p;
    s.predicted_soc.assign(c.eval.soc.begin() + 1, c.eval.soc.end());
    s.predicted_cost = c.eval.objective;
    s.market_cost = c.eval.market_cost;
    s.predicted_dq_cyc = c.eval.dq_cyc;
    s.predicted_dq_cal = c.eval.dq_cal;
    s.predicted_fec = c.eval.stats.delta_fec;
    s.predicted_step_fec.reserve(c.p.size());
    for (double p_dc : c.eval.p_dc_kw) s.predicted_step_fec.push_back(fec_of(pb, p_dc));
    return s;
}

// FEC budget by bisection on a throughput price; keeps the best budget-feasible iterate.
Candidate solve_capped(const HorizonProblem& pb, const DpTables& tab, const SolverConfig& cfg, double budget) {
    auto run = [&](double lambda) { return make_candidate(pb, dp_schedule(pb, tab, lambda)); };
    auto fits = [&](const Candidate& c) { return c.eval.stats.delta_fec <= budget + 1e-12; };

    Candidate free = run(0.0);
    if (fits(free)) return free;

    double lo = 0.0, hi = 1.0;
    Candidate best = run(hi);
    int doublings = 0;
    while (!fits(best)) {
        lo = hi;
        hi *= 2.0;
        best = run(hi);
        if (++doublings > 80) throw InternalError(kModule, "no throughput price meets the FEC budget");
    }
    double dual_bound = free.eval.objective;  // lambda = 0 relaxation
    for (int it = 0; it < cfg.cap_bisection_iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        Candidate c = run(mid);
        dual_bound = std::max(dual_bound, c.eval.objective + mid * (c.eval.stats.delta_fec - budget));
        if (fits(c)) {
            hi = mid;
            if (better(c, best)) best = std::move(c);
        } else {
            lo = mid;
        }
        const double scale = std::max(std::abs(best.eval.objective), 1e-9);
        if ((best.eval.objective - dual_bound) / scale <= cfg.gap) break;
    }
    return best;
}

// Single-step level changes judged by the true objective. A linear throughput price only
// reaches schedules on the convex hull of (market cost, aging); this picks up the rest nearby.
Candidate polish(const HorizonProblem& pb, Candidate best, const SolverConfig& cfg) {
    const std::vector<double> lv = ordered_levels(pb.params.p_max_kw, cfg.power_levels);
    std::vector<double> trial = best.p;
    for (int sweep = 0; sweep < cfg.polish_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t t = 0; t < trial.size(); ++t) {
            for (double p : lv) {
                if (p == best.p[t]) continue;
                trial[t] = p;
                auto ev = evaluate_schedule(pb, trial);
                if (ev && ev->objective < best.eval.objective - 1e-12) {
                    best = Candidate{trial, std::move(*ev)};
                    improved = true;
                }
            }
            trial[t] = best.p[t];
        }
        if (!improved) break;
    }
    return best;
}

// Scan of throughput prices (EUR/FEC). The grid depends only on the price spread, so the
// candidate set is the same for every c_aging and the selected schedule's aging cost can only
// fall as c_aging rises. Candidates are ranked by the true coupled objective.
Candidate solve_aging(const HorizonProblem& pb, const DpTables& tab, const SolverConfig& cfg) {
    Candidate best = make_candidate(pb, std::vector<double>(static_cast<std::size_t>(pb.grid.n_steps), 0.0));
    if (pb.c_aging == 0.0) {
        Candidate c = make_candidate(pb, dp_schedule(pb, tab, 0.0));
        if (better(c, best)) best = std::move(c);
        return polish(pb, std::move(best), cfg);
    }
    const auto [lo, hi] = std::minmax_element(pb.prices.begin(), pb.prices.end());
    // No cycle earns more than the spread on q_act per FEC; beyond that price the plan is idle.
    const double lambda_max = std::max(*hi - *lo, 1e-6) * pb.q_act_kwh / 1000.0;
    std::vector<double> lambdas{0.0};
    for (int k = 0; k < std::max(1, cfg.aging_scan_points); ++k) {
        lambdas.push_back(lambda_max * std::pow(cfg.aging_scan_ratio, -k));
    }
    for (double lambda : lambdas) {
        Candidate c = make_candidate(pb, dp_schedule(pb, tab, lambda));
        if (better(c, best)) best = std::move(c);
    }
    return polish(pb, std::move(best), cfg);
}

}  // namespace

std::vector<double> power_levels(double p_max_kw, int levels) {
    if (levels < 2) throw ConfigError(kModule, "need at least two power levels");
    std::vector<double> lv(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k) {
        lv[static_cast<std::size_t>(k)] = -p_max_kw + 2.0 * p_max_kw * k / (levels - 1);
    }
    if (levels % 2 == 1) lv[static_cast<std::size_t>(levels / 2)] = 0.0;
    else lv.insert(lv.begin() + levels / 2, 0.0);
    return lv;
}

HorizonProblem assemble_problem(const StringState& believed, const PriceSeries& prices, ObjectiveMode mode,
                                const CellModelParams& params, const ProblemCaps& caps) {
    believed.validate();
    if (!(believed.soh() > params.eol)) {
        throw StringRetiredError(kModule, "believed SOH " + std::to_string(believed.soh()) + " is at or below end of life");
    }
    if (mode == ObjectiveMode::market_plus_aging && (caps.fec_cap_per_day || caps.fec_budget)) {
        throw ConfigError(kModule, "an FEC cap applies only to the market-only objective");
    }
    if (!(caps.c_aging >= 0.0)) throw ConfigError(kModule, "c_aging must be nonnegative");
    HorizonProblem pb;
    pb.grid = prices.grid;
    pb.prices = prices.prices;
    pb.believed = believed;
    pb.params = params;
    pb.inverter = InverterModel::constant(params.eta_inv);
    pb.mode = mode;
    pb.c_aging = caps.c_aging;
    pb.fec_cap_per_day = caps.fec_cap_per_day;
    pb.fec_budget = caps.fec_budget;
    if (!pb.fec_budget && caps.fec_cap_per_day) {
        pb.fec_budget = *caps.fec_cap_per_day * static_cast<double>(pb.grid.span()) / static_cast<double>(kDay);
    }
    pb.resistance = effective_resistance(params.r0_ohm, believed.r_incr);
    pb.soh = believed.soh();
    pb.capacity_ah = params.capacity_ah() * pb.soh;
    pb.q_act_kwh = params.q_nom_kwh * pb.soh;
    pb.terminal_price = prices.mean();
    return pb;
}

double aging_cost(double dq_cyc, double c_aging, double q_nom_kwh, double eol) {
    if (!(eol < 1.0)) throw DomainError(kModule, "end-of-life threshold must be below 1");
    if (dq_cyc < 0.0 || c_aging < 0.0 || q_nom_kwh < 0.0) throw DomainError(kModule, "negative aging cost input");
    return dq_cyc * c_aging * q_nom_kwh / (1.0 - eol);
}

std::optional<ModelStep> model_step(const HorizonProblem& pb, double soc, double p_ac_kw) {
    const CellModelParams& p = pb.params;
    const double ocv_v = ocv(std::clamp(soc, 0.0, 1.0), p.ocv_curve);
    if (p_ac_kw == 0.0) return ModelStep{soc, 0.0, ocv_v, 0.0};
    if (std::abs(p_ac_kw) > p.p_max_kw * (1.0 + 1e-12)) return std::nullopt;
    const double p_dc_w = inverter_dc_from_ac(std::clamp(p_ac_kw, -p.p_max_kw, p.p_max_kw), pb.inverter, p.p_max_kw) * 1000.0;
    if (p_dc_w < 0.0 && -p_dc_w >= max_discharge_power_w(ocv_v, pb.resistance)) return std::nullopt;
    const double i = current_from_dc_power(ocv_v, pb.resistance, p_dc_w);
    if (std::abs(i) > p.i_max_a) return std::nullopt;
    const double v = terminal_voltage(ocv_v, pb.resistance, i);
    if (v < p.v_min || v > p.v_max) return std::nullopt;
    const double next = soc + i * pb.grid.dt_hours() / pb.capacity_ah;
    if (next < std::min(p.soc_min, soc) || next > std::max(p.soc_max, soc)) return std::nullopt;
    return ModelStep{next, i, v, p_dc_w / 1000.0};
}

std::optional<ScheduleEvaluation> evaluate_schedule(const HorizonProblem& pb, std::span<const double> p_ac_kw) {
    const auto n = static_cast<std::size_t>(pb.grid.n_steps);
    if (p_ac_kw.size() != n) throw DomainError(kModule, "schedule length does not match the horizon");
    ScheduleEvaluation ev;
    ev.soc.reserve(n + 1);
    ev.soc.push_back(pb.believed.soc);
    const double dt_h = pb.grid.dt_hours();
    double q_cal = pb.believed.q_loss_cal;
    for (std::size_t t = 0; t < n; ++t) {
        auto step = model_step(pb, ev.soc.back(), p_ac_kw[t]);
        if (!step) return std::nullopt;
        ev.soc.push_back(step->soc_next);
        ev.current_a.push_back(step->current_a);
        ev.voltage_v.push_back(step->voltage_v);
        ev.p_dc_kw.push_back(step->p_dc_kw);
        ev.market_cost += energy_cost(pb.prices[t], p_ac_kw[t], dt_h);
        const double dq = calendar_loss_step(std::clamp(step->soc_next, 0.0, 1.0), q_cal, dt_h, pb.params);
        q_cal += dq;
        ev.dq_cal += dq;
    }
    const CycleBasis basis{pb.q_act_kwh, pb.capacity_ah, 0.01 * pb.params.i_max_a};
    ev.stats = cycle_stats(ev.soc, ev.current_a, ev.voltage_v, pb.grid, basis);
    ev.dq_cyc = cyclic_loss(ev.stats, pb.believed.q_loss_cyc, pb.params);
    if (pb.mode == ObjectiveMode::market_plus_aging) {
        ev.aging_cost = aging_cost(ev.dq_cyc, pb.c_aging, pb.params.q_nom_kwh, pb.params.eol);
    }
    ev.terminal_value = terminal_value(pb, ev.soc.back());
    ev.objective = ev.market_cost + ev.aging_cost - ev.terminal_value;
    return ev;
}

DispatchSchedule solve_horizon(const HorizonProblem& pb, const SolverConfig& cfg) {
    const DpTables tab = build_tables(pb, cfg);
    if (pb.mode == ObjectiveMode::market_plus_aging) return to_schedule(pb, solve_aging(pb, tab, cfg));
    if (pb.fec_budget) return to_schedule(pb, solve_capped(pb, tab, cfg, std::max(0.0, *pb.fec_budget)));
    return to_schedule(pb, make_candidate(pb, dp_schedule(pb, tab, 0.0)));
}

DispatchSchedule enumerate_optimal(const HorizonProblem& pb, int levels) {
    const auto n = static_cast<std::size_t>(pb.grid.n_steps);
    if (n > 8 || levels > 5) throw OracleScopeError(kModule, "oracle limited to 8 steps and 5 power levels");
    const std::vector<double> lv = ordered_levels(pb.params.p_max_kw, levels);

    std::vector<double> seq(n, 0.0);
    std::vector<double> soc(n + 1, pb.believed.soc);
    std::optional<Candidate> best;
    double best_abs = kInf;

    auto visit = [&](auto&& self, std::size_t t) -> void {
        if (t == n) {
            auto ev = evaluate_schedule(pb, seq);
            if (!ev) return;
            if (pb.mode == ObjectiveMode::market_only && pb.fec_budget && ev->stats.delta_fec > *pb.fec_budget + 1e-12) return;
            double abs_sum = 0.0;
            for (double p : seq) abs_sum += std::abs(p);
            const bool wins = !best || ev->objective < best->eval.objective - 1e-12 ||
                              (ev->objective <= best->eval.objective + 1e-12 && abs_sum < best_abs);
            if (wins) {
                best = Candidate{seq, std::move(*ev)};
                best_abs = abs_sum;
            }
            return;
        }
        for (double p : lv) {
            auto step = model_step(pb, soc[t], p);
            if (!step) continue;
            seq[t] = p;
            soc[t + 1] = step->soc_next;
            self(self, t + 1);
        }
        seq[t] = 0.0;
    };
    visit(visit, 0);
    if (!best) throw InternalError(kModule, "no feasible schedule found");
    return to_schedule(pb, *best);
}

}  // namespace bess
