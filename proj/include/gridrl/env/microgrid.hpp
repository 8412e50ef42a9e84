#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "gridrl/data/observation.hpp"
#include "gridrl/data/time_series.hpp"
#include "gridrl/env/grid_config.hpp"

namespace gridrl::env {

/// Turbine output for one machine, MW. Zero outside [cut-in, cut-out],
/// cubic law up to the rated speed, rated output beyond it.
double wind_power(double wind_ms, const WindTurbineParams& p);

/// Solar farm output, MW: linear in irradiance, clamped at capacity.
double pv_power(double radiation_wm2, const GridConfig& grid);

/// ESS efficiency lookup on the configured surface.
enum class EssDirection { Charge, Discharge };
double ess_efficiency(double charge_mwh, double power_mw, EssDirection dir,
                      const GridConfig& grid);

/// Converter efficiency at a given absolute load against its rated load.
double converter_efficiency(double load_mw, double rated_mw, const ConverterCurve& curve);

/// DC flows may route through either the 2 MW or the 5 MW inverter; the
/// simulator always picks the one with lower loss. Ties go to the smaller
/// unit. Flows beyond the large rating are flagged and their efficiency is
/// evaluated at the rating.
struct InverterChoice {
    double rated_mw = 0.0;
    double efficiency = 1.0;
    bool overload = false;
};
InverterChoice select_inverter(double dc_flow_mw, const GridConfig& grid);

/// One battery transition. Requests that would push the charge outside
/// [0, C_max] are clamped to feasibility; `overflow` records the violated MWh.
struct EssStepResult {
    double charge_next_mwh = 0.0;
    double power_executed_mw = 0.0;  // signed: + charge, - discharge
    double overflow_mwh = 0.0;
    double eta_used = 1.0;           // ESS efficiency applied to the executed power
};
EssStepResult ess_step(double charge_mwh, double power_requested_mw, const GridConfig& grid);

/// Everything observable about one executed step.
struct StepInfo {
    double x_requested_mw = 0.0;
    double x_executed_mw = 0.0;
    double overflow_mwh = 0.0;

    double pv_mw = 0.0;        // total PV output
    double wt_mw = 0.0;        // total WT output
    double pv_excess_mw = 0.0; // RES left after battery charging
    double wt_excess_mw = 0.0;

    double x_dc = 0.0;    // DC-side demand after the inverter
    double x_in = 0.0;    // energy imported from the utility grid
    double x_base = 0.0;  // import of the battery-less reference case

    double savings_gbp = 0.0;   // P_t * (X_base - X_in), unnormalized
    double savings_term = 0.0;  // savings scaled by P_max * C_max
    double punish = 0.0;        // squared overflow / X_max
    double reward = 0.0;

    double charge_before_mwh = 0.0;
    double charge_after_mwh = 0.0;

    double inverter_rated_mw = 0.0;
    bool inverter_overload = false;
};

struct EnvState {
    std::size_t index = 0;   // position in the driving series
    double charge_mwh = 0.0;
};

/// Returns the normalized next-hour forecasts for the record at `next_index`.
/// Installed by the harness when running the forecast scenarios.
using ForecastProvider = std::function<data::Forecasts(std::size_t next_index)>;

/// Deterministic single-step microgrid simulator.
///
/// Actions map onto battery power setpoints evenly spaced over
/// [+X_max, -X_max]; index 0 is full charge, the last index full discharge.
/// The battery charges from surplus renewables before importing, and the
/// reward is the cost saving against the battery-less reference case, scaled
/// by P_max * C_max, minus the squared-overflow punishment.
class Microgrid {
public:
    Microgrid(std::shared_ptr<const data::TimeSeries> series, GridConfig grid, int action_count,
              data::HolidayCalendar holidays = {});

    /// Jumps to the first hour of the given week. Charge persists unless
    /// reset_charge is set (simulation start).
    data::Observation reset(std::size_t week_index, bool reset_charge);

    struct StepResult {
        data::Observation observation;
        double reward = 0.0;
        StepInfo info;
    };

    /// Executes a discrete action. Throws SeriesExhausted past the last
    /// usable record.
    StepResult step(int action_index);

    /// Continuous-control path (DDPG, schedule replay). The setpoint is
    /// clamped into [-X_max, X_max].
    StepResult step_power(double x_mw);

    double action_power(int action_index) const;
    int action_count() const { return action_count_; }
    bool exhausted() const { return state_.index + 1 >= series_->size(); }

    const EnvState& state() const { return state_; }
    const GridConfig& grid() const { return grid_; }
    const data::TimeSeries& series() const { return *series_; }

    void set_forecast_provider(ForecastProvider provider) { forecasts_ = std::move(provider); }
    bool has_forecasts() const { return static_cast<bool>(forecasts_); }

    /// Observation for the record at `index` with the current charge.
    data::Observation observe(std::size_t index) const;

private:
    std::shared_ptr<const data::TimeSeries> series_;
    GridConfig grid_;
    int action_count_;
    data::HolidayCalendar holidays_;
    ForecastProvider forecasts_;
    EnvState state_;
};

/// Reward bookkeeping shared by step() and tests. `flows` must already be
/// populated with the executed power, overflow and RES split.
void compute_reward(const data::TimeSeriesRecord& record, const GridConfig& grid, StepInfo& info);

}  // namespace gridrl::env
