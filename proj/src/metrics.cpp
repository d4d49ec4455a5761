#include "bess/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace bess {

namespace {

double step_revenue(double p_kw, double price, double dt_h) { return -p_kw * price * dt_h / 1000.0; }

struct Throughput {
    double planned = 0.0;
    double realized = 0.0;
};

Throughput throughput(const StringLog& log, MismatchMode mode) {
    Throughput t;
    for (const auto& r : log.steps) {
        if (mode == MismatchMode::absolute) {
            t.planned += std::abs(r.planned_kw);
            t.realized += std::abs(r.realized_kw);
        } else {
            t.planned += r.planned_kw;
            t.realized += r.realized_kw;
        }
    }
    return t;
}

double mismatch_of(const Throughput& t) { return t.planned == 0.0 ? 0.0 : 1.0 - t.realized / t.planned; }

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
    return buf;
}

std::string percent2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
    return buf;
}

std::string money(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
}

std::string opt_percent(const std::optional<double>& v) { return v ? percent(*v) : "n/a"; }
std::string opt_money(const std::optional<double>& v) { return v ? money(*v) : "n/a"; }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json kpi_to_json(const StringKpis& k) {
    return {{"name", k.name},
            {"mismatch", k.mismatch},
            {"revenue_eur", k.revenue},
            {"missed_revenue", opt_json(k.missed_revenue)},
            {"delta_soh", k.delta_soh},
            {"revenue_per_soh_loss", opt_json(k.revenue_per_soh_loss)},
            {"delta_fec", k.delta_fec}};
}

}  // namespace

double power_schedule_mismatch(const StringLog& log, MismatchMode mode) { return mismatch_of(throughput(log, mode)); }

double revenue(const StringLog& log, Seconds dt) {
    const double dt_h = to_hours(dt);
    double r = 0.0;
    for (const auto& s : log.steps) r += step_revenue(s.realized_kw, s.price, dt_h);
    return r;
}

std::optional<double> missed_revenue(const StringLog& log, Seconds dt) {
    const double dt_h = to_hours(dt);
    double diff = 0.0;
    for (const auto& s : log.steps) {
        diff += step_revenue(s.realized_kw, s.price, dt_h) - step_revenue(s.planned_kw, s.price, dt_h);
    }
    const double r = revenue(log, dt);
    if (r == 0.0) return std::nullopt;
    return diff / r;
}

double delta_soh(const StringLog& log) { return log.initial.soh() - log.final_state.soh(); }

std::optional<double> revenue_per_soh_loss(double revenue, double delta_soh) {
    if (!(delta_soh > 0.0)) return std::nullopt;
    return revenue / delta_soh;
}

KpiReport kpi_report(const RunLog& log, MismatchMode mode) {
    KpiReport rep;
    rep.scenario = log.scenario;
    rep.expired = log.expired;
    rep.system.name = "system";
    Throughput total;
    double missed_diff = 0.0;
    double ratio_sum = 0.0;
    bool any_ratio = false;
    for (const auto& sl : log.strings) {
        StringKpis k;
        k.name = sl.name;
        const Throughput t = throughput(sl, mode);
        k.mismatch = mismatch_of(t);
        k.revenue = revenue(sl, log.dt);
        k.missed_revenue = missed_revenue(sl, log.dt);
        k.delta_soh = delta_soh(sl);
        k.revenue_per_soh_loss = revenue_per_soh_loss(k.revenue, k.delta_soh);
        k.delta_fec = sl.final_state.fec_total - sl.initial.fec_total;

        total.planned += t.planned;
        total.realized += t.realized;
        if (k.missed_revenue) missed_diff += *k.missed_revenue * k.revenue;
        if (k.revenue_per_soh_loss) {
            ratio_sum += *k.revenue_per_soh_loss;
            any_ratio = true;
        }
        rep.system.revenue += k.revenue;
        rep.system.delta_soh += k.delta_soh;
        rep.system.delta_fec += k.delta_fec;
        rep.strings.push_back(std::move(k));
    }
    rep.system.mismatch = mismatch_of(total);
    if (rep.system.revenue != 0.0) rep.system.missed_revenue = missed_diff / rep.system.revenue;
    rep.system.revenue_per_soh_loss = revenue_per_soh_loss(rep.system.revenue, rep.system.delta_soh);
    if (any_ratio) rep.ratio_sum = ratio_sum;
    return rep;
}

std::string format_kpi_table(const std::vector<KpiReport>& reports) {
    struct Column {
        std::string head;
        std::string sub;
        const StringKpis* kpi;
    };
    std::vector<Column> cols;
    for (const auto& r : reports) {
        for (const auto& s : r.strings) cols.push_back({"scenario " + r.scenario, "String " + s.name, &s});
        cols.push_back({"scenario " + r.scenario, "System", &r.system});
    }
    const std::vector<std::pair<std::string, std::string (*)(const StringKpis&)>> rows = {
        {"Power schedule mismatch", [](const StringKpis& k) { return percent(k.mismatch); }},
        {"Revenues (EUR)", [](const StringKpis& k) { return money(k.revenue); }},
        {"Missed revenues", [](const StringKpis& k) { return opt_percent(k.missed_revenue); }},
        {"Delta SOH", [](const StringKpis& k) { return percent2(k.delta_soh); }},
        {"Revenue per unit SOH loss (EUR/dSOH)", [](const StringKpis& k) { return opt_money(k.revenue_per_soh_loss); }},
        {"Full equivalent cycles", [](const StringKpis& k) {
             char b[32];
             std::snprintf(b, sizeof b, "%.2f", k.delta_fec);
             return std::string(b);
         }},
    };
    std::size_t label_w = 6;
    for (const auto& r : rows) label_w = std::max(label_w, r.first.size());
    std::vector<std::vector<std::string>> cells(rows.size());
    std::vector<std::size_t> width(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        width[c] = std::max(cols[c].head.size(), cols[c].sub.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            cells[r].push_back(rows[r].second(*cols[c].kpi));
            width[c] = std::max(width[c], cells[r].back().size());
        }
    }
    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w, bool left) {
        std::string fill(w > s.size() ? w - s.size() : 0, ' ');
        return left ? s + fill : fill + s;
    };
    auto line = [&](const std::string& label, const std::vector<std::string>& vals) {
        out << pad(label, label_w, true);
        for (std::size_t c = 0; c < vals.size(); ++c) out << " | " << pad(vals[c], width[c], false);
        out << '\n';
    };
    std::vector<std::string> heads, subs;
    for (const auto& c : cols) {
        heads.push_back(c.head);
        subs.push_back(c.sub);
    }
    line("Metric", heads);
    line("", subs);
    std::size_t total = label_w;
    for (auto w : width) total += w + 3;
    out << std::string(total, '-') << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) line(rows[r].first, cells[r]);
    for (const auto& r : reports) {
        out << "scenario " << r.scenario << ": sum of string revenue/dSOH ratios = "
            << (r.ratio_sum ? money(*r.ratio_sum) : std::string("n/a")) << (r.expired ? " (run ended at end of life)" : "")
            << '\n';
    }
    return out.str();
}

std::string kpi_csv(const std::vector<KpiReport>& reports) {
    std::ostringstream out;
    out << "scenario,string,mismatch,revenue_eur,missed_revenue,delta_soh,revenue_per_soh_loss,delta_fec\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
    for (const auto& r : reports) {
        auto row = [&](const StringKpis& k) {
            out << r.scenario << ',' << k.name << ',' << format_number(k.mismatch) << ',' << format_number(k.revenue)
                << ',' << opt(k.missed_revenue) << ',' << format_number(k.delta_soh) << ','
                << opt(k.revenue_per_soh_loss) << ',' << format_number(k.delta_fec) << '\n';
        };
        for (const auto& s : r.strings) row(s);
        row(r.system);
    }
    return out.str();
}

std::string kpi_json(const std::vector<KpiReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["scenario"] = r.scenario;
        j["expired"] = r.expired;
        for (const auto& s : r.strings) j["strings"].push_back(kpi_to_json(s));
        j["system"] = kpi_to_json(r.system);
        j["ratio_sum"] = opt_json(r.ratio_sum);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace bess
