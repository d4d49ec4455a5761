#include "bess/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bess/errors.hpp"
#include "json.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "config";
using nlohmann::json;

std::string mismatch_name(MismatchMode m) { return m == MismatchMode::absolute ? "absolute" : "signed"; }

json state_json(const StringSpec& s) {
    return {{"name", s.name}, {"q_loss_cal", s.init.q_loss_cal}, {"q_loss_cyc", s.init.q_loss_cyc}, {"r_incr", s.init.r_incr}};
}

json nullable_path(const std::optional<std::filesystem::path>& p) { return p ? json(p->string()) : json(nullptr); }

// Full schema with current values.
json to_json(const RunConfig& c) {
    json scen = json::array();
    for (auto id : c.scenarios) scen.push_back(std::string(to_string(id)));
    json strings = json::array();
    for (const auto& s : c.strings) strings.push_back(state_json(s));
    const auto& p = c.cell;
    json cell = {{"q_nom_kwh", p.q_nom_kwh}, {"p_max_kw", p.p_max_kw}, {"i_max_a", p.i_max_a},
                 {"v_min", p.v_min}, {"v_max", p.v_max},
                 {"soc_min", p.soc_min}, {"soc_max", p.soc_max}, {"r0_ohm", p.r0_ohm},
                 {"ocv_table", nullable_path(c.ocv_table)},
                 {"c1", p.c1}, {"d1", p.d1}, {"k_temp", p.k_temp},
                 {"a2", p.a2}, {"b2", p.b2}, {"c2", p.c2}, {"d2", p.d2},
                 {"eta_inv", p.eta_inv}, {"eol", p.eol}, {"q_floor", p.q_floor}, {"k_r", p.k_r}};
    const auto& inv = c.twin_inverter;
    json twin = {{"mode", inv.mode == InverterModel::Mode::curve ? "curve" : "constant"},
                 {"eta", inv.eta_const}, {"p0", inv.p0}, {"k", inv.k}};
    const auto& s = c.solver;
    json solver = {{"soc_nodes", s.soc_nodes}, {"power_levels", s.power_levels}, {"gap", s.gap},
                   {"aging_scan_points", s.aging_scan_points}, {"aging_scan_ratio", s.aging_scan_ratio},
                   {"polish_sweeps", s.polish_sweeps},
                   {"cap_bisection_iters", s.cap_bisection_iters}};
    return {
        {"scenarios", scen},
        {"prices", {{"path", nullable_path(c.prices_path)},
                    {"synthetic", {{"base", c.synthetic.base}, {"amplitude", c.synthetic.daily_amplitude},
                                   {"noise_sd", c.synthetic.noise_sd},
                                   {"resolution_min", static_cast<double>(c.synthetic.resolution) / kMinute}}}}},
        {"output_dir", c.output_dir.string()},
        {"span_days", c.span_days},
        {"seed", c.seed},
        {"start", format_utc(c.start)},
        {"horizons", {{"prediction_h", c.prediction_h}, {"control_h", c.control_h}, {"dt_min", c.dt_min}}},
        {"start_soc", c.start_soc},
        {"fec_cap_per_day", c.fec_cap_per_day},
        {"c_aging", c.c_aging},
        {"cell", cell},
        {"twin_inverter", twin},
        {"solver", solver},
        {"strings", strings},
        {"metrics", {{"mismatch", mismatch_name(c.mismatch)}}},
    };
}

void merge_strict(json& target, const json& patch, const std::string& path) {
    if (!patch.is_object()) throw ConfigError(kModule, "expected an object at '" + (path.empty() ? "<root>" : path) + "'");
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!target.contains(it.key())) throw ConfigError(kModule, "unknown config key '" + key + "'");
        json& slot = target[it.key()];
        if (slot.is_object() && it.value().is_object()) merge_strict(slot, it.value(), key);
        else if (slot.is_object()) throw ConfigError(kModule, "config key '" + key + "' must be an object");
        else slot = it.value();
    }
}

template <class T>
T get(const json& j, const char* key, const std::string& path) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(kModule, "config key '" + path + key + "' has the wrong type");
    }
}

std::optional<std::filesystem::path> get_path(const json& j, const char* key, const std::string& path) {
    if (j.at(key).is_null()) return std::nullopt;
    return std::filesystem::path(get<std::string>(j, key, path));
}

RunConfig from_json(const json& j) {
    RunConfig c;
    c.scenarios.clear();
    for (const auto& s : j.at("scenarios")) {
        if (!s.is_string()) throw ConfigError(kModule, "config key 'scenarios' must list scenario names");
        c.scenarios.push_back(parse_scenario(s.get<std::string>()));
    }
    const json& pr = j.at("prices");
    c.prices_path = get_path(pr, "path", "prices.");
    const json& syn = pr.at("synthetic");
    c.synthetic.base = get<double>(syn, "base", "prices.synthetic.");
    c.synthetic.daily_amplitude = get<double>(syn, "amplitude", "prices.synthetic.");
    c.synthetic.noise_sd = get<double>(syn, "noise_sd", "prices.synthetic.");
    c.synthetic.resolution = std::llround(get<double>(syn, "resolution_min", "prices.synthetic.") * kMinute);
    c.output_dir = get<std::string>(j, "output_dir", "");
    c.span_days = get<double>(j, "span_days", "");
    c.seed = get<std::uint64_t>(j, "seed", "");
    c.start = parse_utc(get<std::string>(j, "start", ""));
    const json& hz = j.at("horizons");
    c.prediction_h = get<double>(hz, "prediction_h", "horizons.");
    c.control_h = get<double>(hz, "control_h", "horizons.");
    c.dt_min = get<double>(hz, "dt_min", "horizons.");
    c.start_soc = get<double>(j, "start_soc", "");
    c.fec_cap_per_day = get<double>(j, "fec_cap_per_day", "");
    c.c_aging = get<double>(j, "c_aging", "");

    const json& cell = j.at("cell");
    const std::string cp = "cell.";
    CellModelParams& p = c.cell;
    p.q_nom_kwh = get<double>(cell, "q_nom_kwh", cp);
    p.p_max_kw = get<double>(cell, "p_max_kw", cp);
    p.i_max_a = get<double>(cell, "i_max_a", cp);
    p.soc_min = get<double>(cell, "soc_min", cp);
    p.soc_max = get<double>(cell, "soc_max", cp);
    p.r0_ohm = get<double>(cell, "r0_ohm", cp);
    c.ocv_table = get_path(cell, "ocv_table", cp);
    p.ocv_curve = c.ocv_table ? OcvCurve::load(*c.ocv_table) : OcvCurve::lfp_default();
    p.c1 = get<double>(cell, "c1", cp);
    p.d1 = get<double>(cell, "d1", cp);
    p.k_temp = get<double>(cell, "k_temp", cp);
    p.a2 = get<double>(cell, "a2", cp);
    p.b2 = get<double>(cell, "b2", cp);
    p.c2 = get<double>(cell, "c2", cp);
    p.d2 = get<double>(cell, "d2", cp);
    p.eta_inv = get<double>(cell, "eta_inv", cp);
    p.eol = get<double>(cell, "eol", cp);
    p.q_floor = get<double>(cell, "q_floor", cp);
    p.k_r = get<double>(cell, "k_r", cp);
    p.v_min = cell.at("v_min").is_null() ? p.ocv_curve.min_voltage() - p.r0_ohm * p.i_max_a : get<double>(cell, "v_min", cp);
    p.v_max = cell.at("v_max").is_null() ? p.ocv_curve.max_voltage() + p.r0_ohm * p.i_max_a : get<double>(cell, "v_max", cp);

    const json& twin = j.at("twin_inverter");
    const std::string mode = get<std::string>(twin, "mode", "twin_inverter.");
    if (mode == "curve") {
        c.twin_inverter = InverterModel::curve(get<double>(twin, "p0", "twin_inverter."), get<double>(twin, "k", "twin_inverter."));
    } else if (mode == "constant") {
        c.twin_inverter = InverterModel::constant(get<double>(twin, "eta", "twin_inverter."));
    } else {
        throw ConfigError(kModule, "twin_inverter.mode must be 'curve' or 'constant'");
    }

    const json& sv = j.at("solver");
    c.solver.soc_nodes = get<int>(sv, "soc_nodes", "solver.");
    c.solver.power_levels = get<int>(sv, "power_levels", "solver.");
    c.solver.gap = get<double>(sv, "gap", "solver.");
    c.solver.aging_scan_points = get<int>(sv, "aging_scan_points", "solver.");
    c.solver.aging_scan_ratio = get<double>(sv, "aging_scan_ratio", "solver.");
    c.solver.cap_bisection_iters = get<int>(sv, "cap_bisection_iters", "solver.");
    c.solver.polish_sweeps = get<int>(sv, "polish_sweeps", "solver.");

    c.strings.clear();
    const json& strs = j.at("strings");
    if (!strs.is_array()) throw ConfigError(kModule, "config key 'strings' must be an array");
    for (std::size_t k = 0; k < strs.size(); ++k) {
        const json& s = strs[k];
        const std::string sp = "strings[" + std::to_string(k) + "].";
        json tmpl = state_json(StringSpec{"", StringState{}});
        json merged = tmpl;
        merge_strict(merged, s, sp.substr(0, sp.size() - 1));
        StringSpec spec;
        spec.name = get<std::string>(merged, "name", sp);
        if (spec.name.empty()) throw ConfigError(kModule, "config key '" + sp + "name' is required");
        spec.init.q_loss_cal = get<double>(merged, "q_loss_cal", sp);
        spec.init.q_loss_cyc = get<double>(merged, "q_loss_cyc", sp);
        spec.init.r_incr = get<double>(merged, "r_incr", sp);
        c.strings.push_back(spec);
    }
    const std::string mm = get<std::string>(j.at("metrics"), "mismatch", "metrics.");
    if (mm == "absolute") c.mismatch = MismatchMode::absolute;
    else if (mm == "signed") c.mismatch = MismatchMode::signed_sum;
    else throw ConfigError(kModule, "metrics.mismatch must be 'absolute' or 'signed'");
    return c;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(kModule, std::string("malformed config: ") + e.what());
    }
}

// Schema with v_min/v_max nulled when they equal the values derived from OCV, r0 and i_max,
// so that they keep following those inputs.
json editable_json(const RunConfig& c) {
    json full = to_json(c);
    const auto& p = c.cell;
    if (p.v_min == p.ocv_curve.min_voltage() - p.r0_ohm * p.i_max_a) full["cell"]["v_min"] = nullptr;
    if (p.v_max == p.ocv_curve.max_voltage() + p.r0_ohm * p.i_max_a) full["cell"]["v_max"] = nullptr;
    return full;
}

RunConfig merged(const RunConfig& base, const json& patch) {
    json full = editable_json(base);
    merge_strict(full, patch, "");
    RunConfig out = from_json(full);
    out.validate();
    return out;
}

}  // namespace

Seconds RunConfig::dt() const { return std::llround(dt_min * kMinute); }

Seconds RunConfig::span() const { return std::llround(span_days * kDay); }

void RunConfig::validate() const {
    if (scenarios.empty()) throw ConfigError(kModule, "no scenarios selected");
    if (!(span_days > 0.0)) throw ConfigError(kModule, "span_days must be positive");
    if (dt() <= 0 || std::abs(dt_min * kMinute - static_cast<double>(dt())) > 1e-6) {
        throw ConfigError(kModule, "dt_min must be a positive whole number of seconds");
    }
    if (span() % dt() != 0) throw ConfigError(kModule, "span is not a multiple of dt");
    if (prices_path && !std::filesystem::exists(*prices_path)) {
        throw IngestionError(kModule, "price file " + prices_path->string() + " does not exist");
    }
    if (!(c_aging >= 0.0)) throw ConfigError(kModule, "c_aging must be nonnegative");
    if (!(fec_cap_per_day >= 0.0)) throw ConfigError(kModule, "fec_cap_per_day must be nonnegative");
    if (solver.soc_nodes < 2 || solver.power_levels < 2) throw ConfigError(kModule, "solver grids too small");
    if (!(solver.gap > 0.0) || solver.cap_bisection_iters < 1 || solver.aging_scan_points < 1 || !(solver.aging_scan_ratio > 1.0) ||
        solver.polish_sweeps < 0) {
        throw ConfigError(kModule, "solver settings out of range");
    }
    cell.validate();
    twin_inverter.validate();
    for (auto id : scenarios) scenario_from_config(*this, id).validate();
}

RunConfig parse_run_config(std::string_view json_text, const RunConfig& base) {
    return merged(base, parse_json(json_text));
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(kModule, "cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

RunConfig apply_overrides(const RunConfig& config, const std::vector<std::string>& assignments) {
    if (assignments.empty()) return config;
    json patch = json::object();
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError(kModule, "override '" + a + "' is not key=value");
        const std::string key = a.substr(0, eq);
        const std::string raw = a.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        json* node = &patch;
        std::size_t pos = 0;
        while (true) {
            const auto dot = key.find('.', pos);
            const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            pos = dot + 1;
        }
    }
    return merged(config, patch);
}

std::string effective_config_json(const RunConfig& config) {
    json j = to_json(config);
    j.erase("output_dir");
    return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config) {
    const std::string text = effective_config_json(config);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioConfig scenario_from_config(const RunConfig& config, ScenarioId id) {
    ScenarioConfig sc = make_scenario(id, config.strings, config.fec_cap_per_day);
    sc.prediction = std::llround(config.prediction_h * kHour);
    sc.control = std::llround(config.control_h * kHour);
    sc.dt = config.dt();
    sc.start_soc = config.start_soc;
    return sc;
}

EngineSettings engine_settings(const RunConfig& config) {
    EngineSettings s;
    s.params = config.cell;
    s.twin_inverter = config.twin_inverter;
    s.c_aging = config.c_aging;
    s.solver = config.solver;
    s.seed = config.seed;
    s.config_hash = config_hash(config);
    return s;
}

PriceSeries prices_for(const RunConfig& config) {
    if (config.prices_path) return load_prices(*config.prices_path, config.dt());
    SyntheticPriceSpec spec = config.synthetic;
    spec.seed = config.seed;
    spec.start = config.start;
    const Seconds need = config.span() + std::llround(config.prediction_h * kHour);
    spec.days = static_cast<int>((need + kDay - 1) / kDay);
    return gen_synthetic_prices(spec, config.dt());
}

}  // namespace bess
