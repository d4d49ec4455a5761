#include "bess/params.hpp"

#include "bess/errors.hpp"

namespace bess {

namespace {
constexpr const char* kModule = "core";
}

void CellModelParams::validate() const {
    if (!(soc_min >= 0.0 && soc_min < soc_max && soc_max <= 1.0)) throw ConfigError(kModule, "need 0 <= soc_min < soc_max <= 1");
    if (!(v_min < v_max)) throw ConfigError(kModule, "need v_min < v_max");
    if (!(q_nom_kwh > 0.0 && p_max_kw > 0.0 && i_max_a > 0.0 && r0_ohm > 0.0)) {
        throw ConfigError(kModule, "q_nom, p_max, i_max and r0 must be positive");
    }
    if (ocv_curve.points().size() < 2) throw ConfigError(kModule, "missing OCV curve");
    if (!(eta_inv > 0.0 && eta_inv <= 1.0)) throw ConfigError(kModule, "eta_inv outside (0, 1]");
    if (!(eol > 0.0 && eol < 1.0)) throw ConfigError(kModule, "eol outside (0, 1)");
    if (!(q_floor > 0.0)) throw ConfigError(kModule, "q_floor must be positive");
    if (!(k_r >= 0.0)) throw ConfigError(kModule, "k_r must be nonnegative");
    if (!(k_temp >= 0.0)) throw ConfigError(kModule, "k_temp must be nonnegative");
}

CellModelParams default_cell_params() {
    CellModelParams p;
    p.ocv_curve = OcvCurve::lfp_default();
    p.v_min = p.ocv_curve.min_voltage() - p.r0_ohm * p.i_max_a;
    p.v_max = p.ocv_curve.max_voltage() + p.r0_ohm * p.i_max_a;
    return p;
}

}  // namespace bess
