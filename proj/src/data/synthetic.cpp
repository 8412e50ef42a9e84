#include "gridrl/data/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "gridrl/rng.hpp"

namespace gridrl::data {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double weibull_quantile(double u, double shape, double scale) {
    u = std::min(u, 1.0 - 1e-12);
    return scale * std::pow(-std::log(1.0 - u), 1.0 / shape);
}

}  // namespace

TimeSeries generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    const std::size_t hours = static_cast<std::size_t>(cfg.weeks) * kHoursPerWeek;
    std::vector<TimeSeriesRecord> recs;
    recs.reserve(hours);

    // AR(1) latents keep wind and clearness from jumping hour to hour.
    const double wind_rho = 0.85;
    const double clear_rho = 0.7;
    double wind_latent = rng.gaussian();
    double clear_latent = rng.gaussian();

    for (std::size_t h = 0; h < hours; ++h) {
        TimeSeriesRecord r;
        r.epoch_hour = cfg.start_epoch_hour + static_cast<std::int64_t>(h);
        const int hod = hour_of_day(r.epoch_hour);
        const bool weekend = weekday_index(r.epoch_hour) >= 5;
        const double day_of_year =
            static_cast<double>((r.epoch_hour / 24) % 365);

        // demand: morning-to-evening hump, weekend dip, noise; held in [0, 5]
        // so observations stay inside the unit box
        double demand = cfg.demand_base +
                        cfg.demand_daily_amp * std::sin(kTwoPi * (hod - 7) / 24.0) +
                        (weekend ? -cfg.demand_weekend_dip : 0.2 * cfg.demand_weekend_dip) +
                        cfg.demand_noise * rng.gaussian();
        r.demand_mwh = std::clamp(demand, 0.0, 5.0);

        // price: daily shape plus noise, with rare multiplicative spikes
        const double daily_shape = 0.25 * std::sin(kTwoPi * (hod - 9) / 24.0);
        const double price_noise = 0.12 * rng.gaussian();
        const double spike_draw = rng.uniform();
        double spike = 0.0;
        if (spike_draw < cfg.price_spike_prob) spike = rng.uniform(1.0, 3.5);
        double price = cfg.price_mean *
                       (1.0 + cfg.price_volatility * (daily_shape + price_noise + spike));
        r.price_gbp_mwh = std::clamp(price, 0.0, kPriceCap);

        // wind: correlated gaussian mapped through the Weibull quantile
        wind_latent = wind_rho * wind_latent +
                      std::sqrt(1.0 - wind_rho * wind_rho) * rng.gaussian();
        r.wind_ms = weibull_quantile(normal_cdf(wind_latent), cfg.wind_weibull_shape,
                                     cfg.wind_weibull_scale);

        // solar: clear-sky sine envelope over daytime, seasonal swing, clearness
        clear_latent = clear_rho * clear_latent +
                       std::sqrt(1.0 - clear_rho * clear_rho) * rng.gaussian();
        r.clearness = std::clamp(0.55 + 0.25 * clear_latent, 0.05, 1.0);
        const double seasonal =
            1.0 + cfg.solar_seasonal_amp * std::sin(kTwoPi * (day_of_year - 81.0) / 365.0);
        const double elevation =
            (hod >= 6 && hod <= 18) ? std::sin(M_PI * (hod - 6) / 12.0) : 0.0;
        r.solar_wm2 = std::max(0.0, 1000.0 * seasonal * r.clearness * elevation);

        r.temp_c = 10.0 + 8.0 * std::sin(kTwoPi * (day_of_year - 110.0) / 365.0) +
                   4.0 * std::sin(kTwoPi * (hod - 10) / 24.0) + 1.5 * rng.gaussian();
        r.humidity = std::clamp(0.7 - 0.15 * std::sin(kTwoPi * (hod - 12) / 24.0) +
                                    0.08 * rng.gaussian(),
                                0.05, 1.0);
        recs.push_back(r);
    }
    return TimeSeries(std::move(recs));
}

}  // namespace gridrl::data
