#include "bess/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace bess {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestionError("cli", "cannot write " + path.string());
    out << text;
}

std::vector<KpiReport> run_all(const RunConfig& config, std::ostream& out, bool comparison) {
    config.validate();
    const EngineSettings settings = engine_settings(config);
    const PriceSeries prices = prices_for(config);
    std::filesystem::create_directories(config.output_dir);
    write_text(config.output_dir / "prices.csv", prices_to_csv(prices));

    std::vector<KpiReport> reports;
    for (ScenarioId id : config.scenarios) {
        const ScenarioConfig sc = scenario_from_config(config, id);
        const RunLog log = run_rolling_horizon(sc, settings, prices, config.span());
        write_run_log(log, config.output_dir / ("scenario_" + std::string(to_string(id))));
        reports.push_back(kpi_report(log, config.mismatch));
        out << "scenario " << to_string(id) << ": " << log.windows_run << " windows"
            << (log.expired ? " (stopped: " + log.expiry_note + ")" : std::string()) << '\n';
    }
    const std::string table = format_kpi_table(reports);
    write_text(config.output_dir / "report.txt", table);
    write_text(config.output_dir / "report.csv", kpi_csv(reports));
    write_text(config.output_dir / "report.json", kpi_json(reports));
    write_text(config.output_dir / "effective_config.json", effective_config_json(config));
    if (comparison) write_text(config.output_dir / "comparison.txt", table);
    out << table;
    return reports;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return kExitConfig;
        case ErrorKind::data: return kExitData;
        case ErrorKind::runtime: return kExitRuntime;
    }
    return kExitRuntime;
}

std::vector<KpiReport> cmd_run(const RunConfig& config, std::ostream& out) { return run_all(config, out, false); }

std::vector<KpiReport> cmd_compare(const RunConfig& config, std::ostream& out) { return run_all(config, out, true); }

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-string battery arbitrage: rolling-horizon dispatch against a digital twin"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::vector<std::string> scenarios;
    std::string prices_path, out_dir;
    double days = 0.0;
    std::int64_t seed = -1;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON run configuration");
        cmd->add_option("-s,--scenario", scenarios, "Scenario id (I, II, III, IV); repeatable")->delimiter(',');
        cmd->add_option("--prices", prices_path, "Price CSV (timestamp, EUR/MWh); synthetic prices if omitted");
        cmd->add_option("-o,--out", out_dir, "Output directory");
        cmd->add_option("--days", days, "Simulated span in days");
        cmd->add_option("--seed", seed, "Seed for synthetic prices");
        cmd->add_option("--set", sets, "Override any config key, e.g. --set cell.r0_ohm=0.2");
    };

    CLI::App* run = app.add_subcommand("run", "Run the configured scenarios");
    add_run_flags(run);
    CLI::App* compare = app.add_subcommand("compare", "Run scenarios side by side (default I-IV)");
    add_run_flags(compare);

    CLI::App* validate = app.add_subcommand("validate-config", "Check a configuration and print the effective values");
    validate->add_option("config", config_path, "JSON run configuration")->required();
    validate->add_option("--set", sets, "Override any config key");

    CLI::App* gen = app.add_subcommand("gen-prices", "Write a synthetic intraday price series as CSV");
    SyntheticPriceSpec spec;
    std::string gen_out, gen_start = "2021-01-01T00:00:00Z";
    double resolution_min = 15.0;
    gen->add_option("--seed", spec.seed, "Random seed");
    gen->add_option("--days", spec.days, "Number of days")->check(CLI::PositiveNumber);
    gen->add_option("--base", spec.base, "Mean price, EUR/MWh");
    gen->add_option("--amplitude", spec.daily_amplitude, "Daily amplitude, EUR/MWh");
    gen->add_option("--noise-sd", spec.noise_sd, "Gaussian noise standard deviation, EUR/MWh");
    gen->add_option("--start", gen_start, "First timestamp (UTC)");
    gen->add_option("--resolution-min", resolution_min, "Product length in minutes");
    gen->add_option("-o,--out", gen_out, "Output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed()) {
            spec.start = parse_utc(gen_start);
            spec.resolution = std::llround(resolution_min * kMinute);
            const PriceSeries p = gen_synthetic_prices(spec, spec.resolution);
            const std::string csv = prices_to_csv(p);
            if (gen_out.empty()) out << csv;
            else write_text(gen_out, csv);
            return kExitOk;
        }

        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (compare->parsed() && scenarios.empty() && config_path.empty()) {
            cfg.scenarios = {ScenarioId::I, ScenarioId::II, ScenarioId::III, ScenarioId::IV};
        }
        std::vector<std::string> overrides = sets;
        if (!scenarios.empty()) {
            std::string list = "[";
            for (std::size_t k = 0; k < scenarios.size(); ++k) list += (k ? ",\"" : "\"") + scenarios[k] + "\"";
            overrides.push_back("scenarios=" + list + "]");
        }
        if (!prices_path.empty()) overrides.push_back("prices.path=\"" + prices_path + "\"");
        if (!out_dir.empty()) overrides.push_back("output_dir=\"" + out_dir + "\"");
        if (days > 0.0) overrides.push_back("span_days=" + format_number(days));
        if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
        cfg = apply_overrides(cfg, overrides);
        cfg.validate();

        if (validate->parsed()) {
            out << effective_config_json(cfg);
            out << "config OK (hash " << config_hash(cfg) << ")\n";
            return kExitOk;
        }
        if (compare->parsed()) cmd_compare(cfg, out);
        else cmd_run(cfg, out);
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace bess
