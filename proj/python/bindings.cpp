#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "bess/cli.hpp"
#include "bess/config.hpp"
#include "bess/dispatch.hpp"
#include "bess/ecm.hpp"
#include "bess/engine.hpp"
#include "bess/metrics.hpp"
#include "bess/prices.hpp"

namespace py = pybind11;
using namespace bess;

namespace {

RunConfig make_config(const std::string& json_text, const std::vector<std::string>& overrides) {
    RunConfig c = json_text.empty() ? RunConfig{} : parse_run_config(json_text);
    return apply_overrides(c, overrides);
}

py::dict schedule_dict(const DispatchSchedule& s) {
    py::dict d;
    d["p_ac_kw"] = s.p_ac;
    d["predicted_soc"] = s.predicted_soc;
    d["predicted_cost_eur"] = s.predicted_cost;
    d["market_cost_eur"] = s.market_cost;
    d["predicted_fec"] = s.predicted_fec;
    d["predicted_dq_cyc"] = s.predicted_dq_cyc;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Battery arbitrage dispatch and digital twin (C++ core).";

    auto base = py::register_exception<Error>(m, "BessError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IngestionError>(m, "IngestionError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    m.def("ocv", [](double soc) { return ocv(soc, OcvCurve::lfp_default()); }, py::arg("soc"),
          "Open-circuit voltage of the default LFP string, V.");
    m.def("current_from_dc_power", &current_from_dc_power, py::arg("ocv"), py::arg("r"), py::arg("p_dc_w"));

    m.def(
        "gen_prices",
        [](int days, std::uint64_t seed, double base_price, double amplitude, double noise_sd, double resolution_min) {
            SyntheticPriceSpec spec;
            spec.days = days;
            spec.seed = seed;
            spec.base = base_price;
            spec.daily_amplitude = amplitude;
            spec.noise_sd = noise_sd;
            spec.resolution = std::llround(resolution_min * kMinute);
            const PriceSeries p = gen_synthetic_prices(spec, spec.resolution);
            std::vector<std::string> ts;
            for (std::int64_t k = 0; k < p.grid.n_steps; ++k) ts.push_back(format_utc(p.grid.time_at(k)));
            return py::make_tuple(ts, p.prices);
        },
        py::arg("days") = 1, py::arg("seed") = 42, py::arg("base") = 80.0, py::arg("amplitude") = 40.0,
        py::arg("noise_sd") = 10.0, py::arg("resolution_min") = 15.0,
        "Synthetic intraday prices: (UTC timestamps, EUR/MWh).");

    m.def(
        "solve_horizon",
        [](std::vector<double> prices, double soc, double dt_min, bool aging, double c_aging,
           std::optional<double> fec_cap_per_day, int soc_nodes, int power_levels) {
            const Seconds dt = std::llround(dt_min * kMinute);
            const auto n = static_cast<Seconds>(prices.size());
            const PriceSeries series(build_time_grid(0, n * dt, dt), std::move(prices));
            StringState s;
            s.soc = soc;
            ProblemCaps caps;
            caps.c_aging = c_aging;
            caps.fec_cap_per_day = fec_cap_per_day;
            const HorizonProblem pb = assemble_problem(
                s, series, aging ? ObjectiveMode::market_plus_aging : ObjectiveMode::market_only, default_cell_params(),
                caps);
            SolverConfig cfg;
            cfg.soc_nodes = soc_nodes;
            cfg.power_levels = power_levels;
            DispatchSchedule out;
            {
                py::gil_scoped_release release;
                out = solve_horizon(pb, cfg);
            }
            return schedule_dict(out);
        },
        py::arg("prices"), py::arg("soc") = 0.5, py::arg("dt_min") = 5.0, py::arg("aging") = false,
        py::arg("c_aging") = 200.0, py::arg("fec_cap_per_day") = py::none(), py::arg("soc_nodes") = 201,
        py::arg("power_levels") = 41, "Optimal schedule for one fresh string over the given prices.");

    m.def(
        "validate_config",
        [](const std::string& json_text, const std::vector<std::string>& overrides) {
            return effective_config_json(make_config(json_text, overrides));
        },
        py::arg("config_json") = "", py::arg("overrides") = std::vector<std::string>{},
        "Effective configuration as JSON text.");

    m.def(
        "run",
        [](const std::string& json_text, const std::vector<std::string>& overrides) {
            const RunConfig cfg = make_config(json_text, overrides);
            std::ostringstream sink;
            std::vector<KpiReport> reports;
            {
                py::gil_scoped_release release;
                reports = cmd_run(cfg, sink);
            }
            return py::make_tuple(kpi_json(reports), format_kpi_table(reports));
        },
        py::arg("config_json") = "", py::arg("overrides") = std::vector<std::string>{},
        "Runs the configured scenarios and writes the output directory; returns (KPI JSON, table).");

    m.def(
        "cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "bess");
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            std::ostringstream out, err;
            const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(rc, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line interface in process: (exit code, stdout, stderr).");
}
