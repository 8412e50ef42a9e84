#pragma once

#include <cstdint>

#include "gridrl/data/time_series.hpp"

namespace gridrl::data {

/// Parameters of the synthetic driving-data generator. The generator is a
/// stand-in for site data: weekly/daily periodic demand, a spiky day-ahead
/// price, Weibull wind and a seasonal solar cycle. Deterministic per seed.
struct SyntheticConfig {
    int weeks = 200;
    std::uint64_t seed = 1;

    // demand: base + daily harmonic + weekend dip + gaussian noise, MWh
    double demand_base = 2.2;
    double demand_daily_amp = 0.9;
    double demand_weekend_dip = 0.5;
    double demand_noise = 0.15;

    // price: mean * (1 + volatility*(daily shape + noise + spikes)), GBP/MWh
    double price_mean = 45.0;
    double price_volatility = 1.0;
    double price_spike_prob = 0.01;

    // wind speed: Weibull marginal with AR(1) temporal correlation
    double wind_weibull_shape = 2.0;
    double wind_weibull_scale = 7.0;

    // solar: seasonal swing of the clear-sky envelope
    double solar_seasonal_amp = 0.35;

    // 2014-01-06 00:00 UTC, a Monday, so hour-of-week starts at 0
    std::int64_t start_epoch_hour = 16076 * 24;

    void validate() const {
        if (weeks < 1) throw ContractViolation("synthetic config: weeks must be >= 1");
        if (demand_base < 0 || demand_daily_amp < 0 || demand_noise < 0)
            throw ContractViolation("synthetic config: demand parameters must be >= 0");
        if (price_mean <= 0 || price_volatility < 0)
            throw ContractViolation("synthetic config: price mean must be > 0, volatility >= 0");
        if (wind_weibull_shape <= 0 || wind_weibull_scale <= 0)
            throw ContractViolation("synthetic config: Weibull parameters must be > 0");
        if (price_spike_prob < 0 || price_spike_prob > 1)
            throw ContractViolation("synthetic config: spike probability outside [0,1]");
    }
};

TimeSeries generate_synthetic(const SyntheticConfig& cfg);

}  // namespace gridrl::data
