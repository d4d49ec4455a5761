#include "bess/ecm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "ecm";
}

OcvCurve::OcvCurve(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw ConfigError(kModule, "OCV curve needs at least two points");
    for (std::size_t k = 1; k < points_.size(); ++k) {
        if (!(points_[k].soc > points_[k - 1].soc)) throw ConfigError(kModule, "OCV curve SOC not strictly increasing");
        if (!(points_[k].volts > points_[k - 1].volts)) {
            throw ConfigError(kModule, "OCV curve voltage not strictly increasing");
        }
    }
    if (points_.front().soc != 0.0 || points_.back().soc != 1.0) {
        throw ConfigError(kModule, "OCV curve must span SOC 0 to 1");
    }
}

double OcvCurve::voltage(double soc) const {
    if (!(soc >= 0.0 && soc <= 1.0)) throw DomainError(kModule, "SOC " + std::to_string(soc) + " outside [0, 1]");
    auto it = std::lower_bound(points_.begin(), points_.end(), soc,
                               [](const Point& p, double s) { return p.soc < s; });
    if (it == points_.begin()) return it->volts;
    const Point& hi = *it;
    const Point& lo = *(it - 1);
    if (hi.soc == soc) return hi.volts;
    const double w = (soc - lo.soc) / (hi.soc - lo.soc);
    return lo.volts + w * (hi.volts - lo.volts);
}

double OcvCurve::mean_voltage() const { return integral(1.0); }

double OcvCurve::integral(double soc) const {
    const double x = std::clamp(soc, 0.0, 1.0);
    double area = 0.0;
    for (std::size_t k = 1; k < points_.size() && points_[k - 1].soc < x; ++k) {
        const double hi = std::min(points_[k].soc, x);
        const double v_hi = voltage(hi);
        area += 0.5 * (v_hi + points_[k - 1].volts) * (hi - points_[k - 1].soc);
    }
    return area;
}

OcvCurve OcvCurve::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError(kModule, "cannot open OCV table " + path.string());
    std::vector<Point> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::string a, b;
        if (!(ss >> a)) continue;
        if (!(ss >> b)) throw IngestionError(kModule, path.string() + ":" + std::to_string(line_no) + ": expected two columns");
        try {
            std::size_t ia = 0, ib = 0;
            double soc = std::stod(a, &ia);
            double v = std::stod(b, &ib);
            if (ia != a.size() || ib != b.size()) throw std::invalid_argument("trailing");
            pts.push_back({soc, v});
        } catch (const std::exception&) {
            if (pts.empty() && line_no == 1) continue;  // header
            throw IngestionError(kModule, path.string() + ":" + std::to_string(line_no) + ": unparseable row");
        }
    }
    return OcvCurve(std::move(pts));
}

OcvCurve OcvCurve::lfp_default() {
    // Per-cell LFP shape scaled to a 240-cell series string.
    static constexpr double cell[21] = {2.900, 3.180, 3.230, 3.255, 3.270, 3.280, 3.287, 3.292, 3.296, 3.299, 3.302,
                                        3.305, 3.309, 3.314, 3.320, 3.327, 3.333, 3.338, 3.345, 3.370, 3.550};
    std::vector<Point> pts;
    pts.reserve(21);
    for (int k = 0; k <= 20; ++k) pts.push_back({k / 20.0, 240.0 * cell[k]});
    pts.front().soc = 0.0;
    pts.back().soc = 1.0;
    return OcvCurve(std::move(pts));
}

double ocv(double soc, const OcvCurve& curve) { return curve.voltage(soc); }

double effective_resistance(double r0, double r_incr) {
    if (!(r_incr >= 1.0)) throw DomainError(kModule, "resistance increase factor below 1");
    return r0 * r_incr;
}

double current_from_dc_power(double ocv, double r, double p_dc_w) {
    if (p_dc_w == 0.0) return 0.0;
    const double disc = ocv * ocv + 4.0 * r * p_dc_w;
    if (!(disc > 0.0)) {
        throw InfeasiblePowerError(kModule, "discharge power " + std::to_string(-p_dc_w) +
                                                " W exceeds what the cell can deliver");
    }
    // Conjugate form of (-ocv + sqrt(disc)) / (2r); no cancellation at small powers, valid for r = 0.
    return 2.0 * p_dc_w / (ocv + std::sqrt(disc));
}

double InverterModel::efficiency(double x) const {
    if (mode == Mode::constant) return eta_const;
    if (x <= 0.0) return 0.0;
    return x / (x + p0 + k * x * x);
}

void InverterModel::validate() const {
    if (mode == Mode::constant) {
        if (!(eta_const > 0.0 && eta_const <= 1.0)) throw ConfigError(kModule, "inverter efficiency outside (0, 1]");
    } else if (!(p0 >= 0.0 && k >= 0.0)) {
        throw ConfigError(kModule, "inverter curve coefficients must be nonnegative");
    }
}

double inverter_dc_from_ac(double p_ac_kw, const InverterModel& model, double p_rated_kw) {
    if (!std::isfinite(p_ac_kw)) throw SetpointError(kModule, "non-finite AC setpoint");
    if (std::abs(p_ac_kw) > p_rated_kw * (1.0 + 1e-12)) {
        throw SetpointError(kModule, "AC setpoint " + std::to_string(p_ac_kw) + " kW exceeds rating");
    }
    if (p_ac_kw == 0.0) return 0.0;
    if (model.mode == InverterModel::Mode::constant) {
        return p_ac_kw > 0.0 ? p_ac_kw * model.eta_const : p_ac_kw / model.eta_const;
    }
    const double x = std::abs(p_ac_kw) / p_rated_kw;
    // Loss = P*(p0 + k x^2) on top of (charge) or in addition to (discharge) the delivered power.
    const double loss = p_rated_kw * (model.p0 + model.k * x * x);
    if (p_ac_kw > 0.0) return p_ac_kw * x / (x + model.p0 + model.k * x * x);
    return p_ac_kw - loss;
}

double inverter_ac_from_dc(double p_dc_kw, const InverterModel& model, double p_rated_kw) {
    if (p_dc_kw == 0.0) return 0.0;
    if (model.mode == InverterModel::Mode::constant) {
        return p_dc_kw > 0.0 ? p_dc_kw / model.eta_const : p_dc_kw * model.eta_const;
    }
    const double p0 = model.p0, kq = model.k;
    if (p_dc_kw > 0.0) {
        // y = x^2 / (x + p0 + k x^2)  =>  (1 - k y) x^2 - y x - y p0 = 0
        const double y = p_dc_kw / p_rated_kw;
        const double a = 1.0 - kq * y;
        const double x = (y + std::sqrt(y * y + 4.0 * a * y * p0)) / (2.0 * a);
        return x * p_rated_kw;
    }
    // |p_dc| / P = x + p0 + k x^2
    const double y = -p_dc_kw / p_rated_kw - p0;
    if (y <= 0.0) return 0.0;
    const double x = kq > 0.0 ? 2.0 * y / (1.0 + std::sqrt(1.0 + 4.0 * kq * y)) : y;
    return -x * p_rated_kw;
}

}  // namespace bess
