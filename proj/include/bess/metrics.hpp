#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bess/engine.hpp"

namespace bess {

// Absolute sums count every kWh of shortfall; signed sums let charge and discharge errors cancel.
enum class MismatchMode { absolute, signed_sum };

struct StringKpis {
    std::string name;
    double mismatch = 0.0;
    double revenue = 0.0;  // EUR, positive = profit
    std::optional<double> missed_revenue;  // empty when revenue is zero
    double delta_soh = 0.0;  // fraction
    std::optional<double> revenue_per_soh_loss;  // EUR per unit (fraction) SOH, empty when no aging
    double delta_fec = 0.0;
};

struct KpiReport {
    std::string scenario;
    std::vector<StringKpis> strings;
    // Aggregates: throughput-weighted mismatch, summed revenue/ΔSOH/ΔFEC,
    // ratio = total revenue / total ΔSOH.
    StringKpis system;
    // Sum of per-string revenue/ΔSOH ratios (the convention of the published result tables).
    std::optional<double> ratio_sum;
    bool expired = false;
};

double power_schedule_mismatch(const StringLog& log, MismatchMode mode = MismatchMode::absolute);
double revenue(const StringLog& log, Seconds dt);
std::optional<double> missed_revenue(const StringLog& log, Seconds dt);
double delta_soh(const StringLog& log);
std::optional<double> revenue_per_soh_loss(double revenue, double delta_soh);

KpiReport kpi_report(const RunLog& log, MismatchMode mode = MismatchMode::absolute);

// Side-by-side table with one column per (scenario, string).
std::string format_kpi_table(const std::vector<KpiReport>& reports);
std::string kpi_csv(const std::vector<KpiReport>& reports);
std::string kpi_json(const std::vector<KpiReport>& reports);

}  // namespace bess
