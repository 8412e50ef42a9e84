#pragma once

#include <algorithm>
#include <cmath>

#include "gridrl/errors.hpp"

namespace gridrl::env {

/// Piecewise power curve parameters for one turbine.
struct WindTurbineParams {
    double cut_in_ms = 3.0;
    double rated_ms = 12.0;
    double cut_out_ms = 25.0;
    double rotor_radius_m = 30.0;
    double power_coeff = 0.4;        // c_p, must stay below the Betz limit
    double air_density = 1.225;      // kg/m^3, standard sea level

    /// Output in the cubic band at the rated speed, MW.
    double rated_power_mw() const {
        const double r = rotor_radius_m;
        const double v3 = rated_ms * rated_ms * rated_ms;
        return 0.5 * air_density * M_PI * r * r * power_coeff * v3 * 1e-6;
    }
};

/// Rational converter efficiency curve over load factor l = load / rated:
///   eta(l) = scale * l / (l + a + b*l^2), clamped into [floor, 1].
/// scale is chosen so the curve's peak sits at `plateau`.
struct ConverterCurve {
    double a = 0.01;
    double b = 0.05;
    double plateau = 0.95;
    double floor = 0.10;

    double operator()(double load_factor) const {
        const double l = std::max(load_factor, 0.0);
        if (a <= 0.0 && b <= 0.0) return std::clamp(plateau, floor, 1.0);  // lossless curve
        const double raw = l / (l + a + b * l * l);
        // peak of raw is at l* = sqrt(a/b); degenerate coefficients peak at 1
        double peak = 1.0;
        if (a > 0.0 && b > 0.0) {
            const double lstar = std::sqrt(a / b);
            peak = lstar / (lstar + a + b * lstar * lstar);
        }
        const double eta = plateau / peak * raw;
        return std::clamp(eta, floor, 1.0);
    }
};

/// ESS charge/discharge loss surface plus converter curves.
///
/// eta(c, x) = eta0 - k1*(|x|/X_max) - k2*(|x|/X_max)*g(c) where g is the
/// state-of-charge penalty: charging degrades towards full charge,
/// discharging towards empty. Swap the coefficients to model other cells.
struct EfficiencyModel {
    double ess_eta0 = 0.98;
    double ess_k1 = 0.06;
    double ess_k2 = 0.12;
    double ess_floor = 0.10;
    double eta_sdc = 0.999;  // hourly self-discharge retention

    ConverterCurve inverter_curve;
    ConverterCurve transformer_curve;

    double ess_charge_eff(double charge_mwh, double power_mw, double c_max, double x_max) const {
        const double u = std::min(std::abs(power_mw) / x_max, 1.0);
        const double soc = std::clamp(charge_mwh / c_max, 0.0, 1.0);
        return std::clamp(ess_eta0 - ess_k1 * u - ess_k2 * u * soc, ess_floor, 1.0);
    }

    double ess_discharge_eff(double charge_mwh, double power_mw, double c_max, double x_max) const {
        const double u = std::min(std::abs(power_mw) / x_max, 1.0);
        const double soc = std::clamp(charge_mwh / c_max, 0.0, 1.0);
        return std::clamp(ess_eta0 - ess_k1 * u - ess_k2 * u * (1.0 - soc), ess_floor, 1.0);
    }

    /// Lossless variant used by reduced-to-arbitrage checks.
    static EfficiencyModel ideal() {
        EfficiencyModel m;
        m.ess_eta0 = 1.0;
        m.ess_k1 = 0.0;
        m.ess_k2 = 0.0;
        m.eta_sdc = 1.0;
        m.inverter_curve = ConverterCurve{0.0, 0.0, 1.0, 1.0};
        m.transformer_curve = ConverterCurve{0.0, 0.0, 1.0, 1.0};
        return m;
    }
};

/// All physical constants of the microgrid.
struct GridConfig {
    double c_max_mwh = 5.0;    // ESS capacity
    double x_max_mw = 2.0;     // ESS power bound per hour step
    double p_max = 250.0;      // price cap, GBP/MWh

    double pv_capacity_mw = 5.0;
    double pv_reference_wm2 = 1000.0;  // irradiance mapped to full capacity

    int wt_count = 2;
    WindTurbineParams turbine;

    double inverter_small_mw = 2.0;
    double inverter_large_mw = 5.0;
    double transformer_wt_mw = 2.0;
    double transformer_utility_mw = 10.0;

    EfficiencyModel eff;

    void validate() const {
        if (c_max_mwh <= 0 || x_max_mw <= 0 || p_max <= 0 || pv_capacity_mw <= 0)
            throw ContractViolation("grid config: all capacities must be positive");
        if (x_max_mw > c_max_mwh)
            throw ContractViolation("grid config: X_max must not exceed C_max per hour step");
        const auto& t = turbine;
        if (!(t.cut_in_ms < t.rated_ms && t.rated_ms < t.cut_out_ms))
            throw ContractViolation("grid config: need cut-in < rated < cut-out");
        if (!(t.power_coeff > 0 && t.power_coeff < 0.593))
            throw ContractViolation("grid config: power coefficient outside (0, 0.593)");
    }
};

}  // namespace gridrl::env
