#include "gridrl/env/microgrid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gridrl::env {

double wind_power(double wind_ms, const WindTurbineParams& p) {
    if (wind_ms < p.cut_in_ms || wind_ms > p.cut_out_ms) return 0.0;
    if (wind_ms >= p.rated_ms) return p.rated_power_mw();
    const double r = p.rotor_radius_m;
    const double v3 = wind_ms * wind_ms * wind_ms;
    return 0.5 * p.air_density * M_PI * r * r * p.power_coeff * v3 * 1e-6;
}

double pv_power(double radiation_wm2, const GridConfig& grid) {
    const double raw = std::max(radiation_wm2, 0.0) / grid.pv_reference_wm2 * grid.pv_capacity_mw;
    return std::min(raw, grid.pv_capacity_mw);
}

double ess_efficiency(double charge_mwh, double power_mw, EssDirection dir,
                      const GridConfig& grid) {
    return dir == EssDirection::Charge
               ? grid.eff.ess_charge_eff(charge_mwh, power_mw, grid.c_max_mwh, grid.x_max_mw)
               : grid.eff.ess_discharge_eff(charge_mwh, power_mw, grid.c_max_mwh, grid.x_max_mw);
}

double converter_efficiency(double load_mw, double rated_mw, const ConverterCurve& curve) {
    return curve(std::abs(load_mw) / rated_mw);
}

InverterChoice select_inverter(double dc_flow_mw, const GridConfig& grid) {
    const double flow = std::abs(dc_flow_mw);
    InverterChoice choice;
    choice.overload = flow > grid.inverter_large_mw;
    const double eval_flow = std::min(flow, grid.inverter_large_mw);

    const double eta_small =
        converter_efficiency(eval_flow, grid.inverter_small_mw, grid.eff.inverter_curve);
    const double eta_large =
        converter_efficiency(eval_flow, grid.inverter_large_mw, grid.eff.inverter_curve);
    if (eta_large > eta_small) {
        choice.rated_mw = grid.inverter_large_mw;
        choice.efficiency = eta_large;
    } else {
        choice.rated_mw = grid.inverter_small_mw;  // tie goes to the smaller unit
        choice.efficiency = eta_small;
    }
    return choice;
}

EssStepResult ess_step(double charge_mwh, double power_requested_mw, const GridConfig& grid) {
    const double c_max = grid.c_max_mwh;
    const double x_max = grid.x_max_mw;
    const double x_req = std::clamp(power_requested_mw, -x_max, x_max);

    EssStepResult out;
    if (x_req > 0.0) {
        // stored energy = x * eta_ch(c, x); solve for the clamped setpoint
        // when the request would overfill.
        const double eta_req = ess_efficiency(charge_mwh, x_req, EssDirection::Charge, grid);
        const double stored_req = x_req * eta_req;
        double charge_pre;
        if (charge_mwh + stored_req > c_max) {
            out.overflow_mwh = charge_mwh + stored_req - c_max;
            const double target = c_max - charge_mwh;
            // stored(x) is monotone increasing on the configured surface
            double lo = 0.0, hi = x_req;
            for (int it = 0; it < 64; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double stored =
                    mid * ess_efficiency(charge_mwh, mid, EssDirection::Charge, grid);
                (stored < target ? lo : hi) = mid;
            }
            out.power_executed_mw = 0.5 * (lo + hi);
            charge_pre = c_max;
        } else {
            out.power_executed_mw = x_req;
            charge_pre = charge_mwh + stored_req;
        }
        out.eta_used =
            ess_efficiency(charge_mwh, out.power_executed_mw, EssDirection::Charge, grid);
        out.charge_next_mwh = charge_pre * grid.eff.eta_sdc;
    } else if (x_req < 0.0) {
        // discharging draws |x| from the charge and delivers |x| * eta_dis
        const double want = -x_req;
        double drawn = want;
        if (want > charge_mwh) {
            out.overflow_mwh = want - charge_mwh;
            drawn = charge_mwh;
        }
        out.power_executed_mw = -drawn;
        out.eta_used = ess_efficiency(charge_mwh, drawn, EssDirection::Discharge, grid);
        out.charge_next_mwh = (charge_mwh - drawn) * grid.eff.eta_sdc;
    } else {
        out.power_executed_mw = 0.0;
        out.charge_next_mwh = charge_mwh * grid.eff.eta_sdc;
    }
    return out;
}

namespace {

/// Net utility import for given DC-side battery flow and leftover renewables.
/// Used twice per step: once with the battery flows and once with zeros for
/// the battery-less base case, so an idle battery cancels exactly.
double utility_import(double ess_bus_mw, double pv_mw, double wt_mw, double demand_mwh,
                      const GridConfig& grid, double* x_dc_out, InverterChoice* inv_out) {
    const double dc_flow = ess_bus_mw - pv_mw;
    const InverterChoice inv = select_inverter(dc_flow, grid);
    const double x_dc = dc_flow * inv.efficiency;

    const double eta_wt =
        converter_efficiency(wt_mw, grid.transformer_wt_mw, grid.eff.transformer_curve);
    const double ac_net = x_dc + demand_mwh - wt_mw * eta_wt;
    const double eta_util =
        converter_efficiency(ac_net, grid.transformer_utility_mw, grid.eff.transformer_curve);

    if (x_dc_out) *x_dc_out = x_dc;
    if (inv_out) *inv_out = inv;
    return ac_net * eta_util;
}

}  // namespace

void compute_reward(const data::TimeSeriesRecord& record, const GridConfig& grid, StepInfo& info) {
    const double x = info.x_executed_mw;

    // charge from surplus renewables first: PV shares the DC bus with the
    // battery, WT comes next, anything left is grid-supplied
    double pv_used = 0.0, wt_used = 0.0;
    double ess_bus = 0.0;
    if (x > 0.0) {
        pv_used = std::min(info.pv_mw, x);
        wt_used = std::min(info.wt_mw, x - pv_used);
        const double grid_charge = x - pv_used - wt_used;
        const double eta_ch = ess_efficiency(info.charge_before_mwh, x, EssDirection::Charge, grid);
        ess_bus = grid_charge * eta_ch;
    } else if (x < 0.0) {
        const double eta_dis =
            ess_efficiency(info.charge_before_mwh, -x, EssDirection::Discharge, grid);
        ess_bus = x * eta_dis;  // delivered energy, negative = into the bus
    }
    info.pv_excess_mw = info.pv_mw - pv_used;
    info.wt_excess_mw = info.wt_mw - wt_used;

    InverterChoice inv;
    info.x_in = utility_import(ess_bus, info.pv_excess_mw, info.wt_excess_mw, record.demand_mwh,
                               grid, &info.x_dc, &inv);
    info.x_base =
        utility_import(0.0, info.pv_mw, info.wt_mw, record.demand_mwh, grid, nullptr, nullptr);
    info.inverter_rated_mw = inv.rated_mw;
    info.inverter_overload = inv.overload;

    info.savings_gbp = record.price_gbp_mwh * (info.x_base - info.x_in);
    info.savings_term = info.savings_gbp / (grid.p_max * grid.c_max_mwh);
    info.punish = info.overflow_mwh * info.overflow_mwh / grid.x_max_mw;
    info.reward = info.savings_term - info.punish;
}

Microgrid::Microgrid(std::shared_ptr<const data::TimeSeries> series, GridConfig grid,
                     int action_count, data::HolidayCalendar holidays)
    : series_(std::move(series)),
      grid_(grid),
      action_count_(action_count),
      holidays_(std::move(holidays)) {
    grid_.validate();
    if (!series_ || series_->empty()) throw ContractViolation("microgrid: empty time series");
    if (action_count_ < 2 || action_count_ % 2 == 0)
        throw ContractViolation("microgrid: action count must be odd and >= 3 so idle exists");
}

double Microgrid::action_power(int action_index) const {
    if (action_index < 0 || action_index >= action_count_)
        throw ContractViolation("action index " + std::to_string(action_index) +
                                " outside action space of size " + std::to_string(action_count_));
    const double spacing = 2.0 * grid_.x_max_mw / (action_count_ - 1);
    return grid_.x_max_mw - action_index * spacing;
}

data::Observation Microgrid::observe(std::size_t index) const {
    const auto& rec = series_->at(index);
    const double pv = pv_power(rec.solar_wm2, grid_);
    const double wt = grid_.wt_count * wind_power(rec.wind_ms, grid_.turbine);
    std::optional<data::Forecasts> fc;
    if (forecasts_ && index + 1 < series_->size()) fc = forecasts_(index + 1);
    return data::normalize_observation(state_.charge_mwh, rec, pv, wt, grid_, holidays_, fc);
}

data::Observation Microgrid::reset(std::size_t week_index, bool reset_charge) {
    const std::size_t start = week_index * data::kHoursPerWeek;
    if (start >= series_->size())
        throw ContractViolation("reset: week " + std::to_string(week_index) +
                                " outside the data range");
    state_.index = start;
    if (reset_charge) state_.charge_mwh = 0.0;
    return observe(state_.index);
}

Microgrid::StepResult Microgrid::step(int action_index) {
    return step_power(action_power(action_index));
}

Microgrid::StepResult Microgrid::step_power(double x_mw) {
    if (exhausted()) throw SeriesExhausted("time series exhausted at index " +
                                           std::to_string(state_.index));
    const auto& rec = series_->at(state_.index);

    StepInfo info;
    info.x_requested_mw = std::clamp(x_mw, -grid_.x_max_mw, grid_.x_max_mw);
    info.charge_before_mwh = state_.charge_mwh;
    info.pv_mw = pv_power(rec.solar_wm2, grid_);
    info.wt_mw = grid_.wt_count * wind_power(rec.wind_ms, grid_.turbine);

    const EssStepResult ess = ess_step(state_.charge_mwh, info.x_requested_mw, grid_);
    info.x_executed_mw = ess.power_executed_mw;
    info.overflow_mwh = ess.overflow_mwh;
    info.charge_after_mwh = ess.charge_next_mwh;

    compute_reward(rec, grid_, info);

    state_.charge_mwh = ess.charge_next_mwh;
    state_.index += 1;

    StepResult out;
    out.observation = observe(state_.index);
    out.reward = info.reward;
    out.info = info;
    return out;
}

}  // namespace gridrl::env
