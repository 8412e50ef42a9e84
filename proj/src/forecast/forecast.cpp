#include "gridrl/forecast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridrl/data/observation.hpp"
#include "gridrl/env/microgrid.hpp"
#include "gridrl/nn/adam.hpp"
#include "gridrl/nn/serialize.hpp"

namespace gridrl::forecast {

const char* target_name(Target t) {
    switch (t) {
        case Target::Demand: return "demand";
        case Target::Price: return "price";
        case Target::Pv: return "pv";
        default: return "wt";
    }
}

Target parse_target(const std::string& name) {
    if (name == "demand") return Target::Demand;
    if (name == "price") return Target::Price;
    if (name == "pv") return Target::Pv;
    if (name == "wt") return Target::Wt;
    throw Error("unknown forecast target: " + name);
}

double normalized_target(const data::TimeSeries& series, std::size_t t, Target target,
                         const env::GridConfig& grid) {
    const auto& r = series.at(t);
    switch (target) {
        case Target::Demand: return data::normalize_energy(r.demand_mwh, grid);
        case Target::Price: return data::normalize_price(r.price_gbp_mwh, grid);
        case Target::Pv: return data::normalize_energy(env::pv_power(r.solar_wm2, grid), grid);
        default:
            return data::normalize_energy(
                grid.wt_count * env::wind_power(r.wind_ms, grid.turbine), grid);
    }
}

int feature_size(Target target, int window) {
    return window + ((target == Target::Demand || target == Target::Price) ? 3 : 0);
}

std::vector<double> build_features(const data::TimeSeries& series, std::size_t t, Target target,
                                   const env::GridConfig& grid, int window) {
    if (t < static_cast<std::size_t>(window))
        throw ContractViolation("forecast features need " + std::to_string(window) +
                                " hours of history, t = " + std::to_string(t));
    if (t >= series.size()) throw ContractViolation("forecast hour beyond the series");

    std::vector<double> f;
    f.reserve(feature_size(target, window));
    for (std::size_t k = t - window; k < t; ++k) {
        f.push_back(normalized_target(series, k, target, grid));
    }
    if (target == Target::Demand || target == Target::Price) {
        // weather at the forecast hour, treated as a known local measurement
        const auto& r = series.at(t);
        f.push_back(data::normalize_temp(r.temp_c));
        f.push_back(data::normalize_humidity(r.humidity));
        f.push_back(data::normalize_clearness(r.clearness));
    }
    return f;
}

Forecaster::Forecaster(Target target, ForecastConfig cfg, nn::Network net, std::size_t train_end)
    : target_(target), cfg_(cfg), net_(std::move(net)), train_end_(train_end) {}

double Forecaster::predict(std::span<const double> features) {
    auto out = net_.forward(features);
    return std::clamp(out[0], 0.0, 1.0);
}

double Forecaster::predict_at(const data::TimeSeries& series, std::size_t t,
                              const env::GridConfig& grid) {
    const auto f = build_features(series, t, target_, grid, cfg_.window);
    return predict(f);
}

void Forecaster::save(const std::string& path) { nn::save_params(net_, path); }

Forecaster train_forecaster(const data::TimeSeries& series, Target target,
                            const ForecastConfig& cfg, const env::GridConfig& grid,
                            std::uint64_t seed) {
    const std::size_t train_end =
        static_cast<std::size_t>(cfg.train_weeks) * data::kHoursPerWeek;
    if (series.size() < train_end)
        throw Error("forecaster training needs " + std::to_string(cfg.train_weeks) +
                    " weeks of data");

    nn::NetworkConfig net_cfg;
    net_cfg.input_size = feature_size(target, cfg.window);
    net_cfg.actions = 1;
    net_cfg.atoms = 1;
    net_cfg.hidden = {cfg.hidden};
    nn::Network net(net_cfg, split_seed(seed, 11));
    nn::Adam opt(net.param_count(), cfg.lr);
    Rng shuffle_rng(split_seed(seed, 12));

    std::vector<std::size_t> order(train_end - cfg.window);
    std::iota(order.begin(), order.end(), static_cast<std::size_t>(cfg.window));

    std::vector<double> dout(1);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with our deterministic rng
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle_rng.uniform_int(static_cast<int>(i))]);
        }
        std::size_t in_batch = 0;
        net.zero_grad();
        for (std::size_t t : order) {
            const auto features = build_features(series, t, target, grid, cfg.window);
            const double y = normalized_target(series, t, target, grid);
            auto out = net.forward(features);
            dout[0] = 2.0 * (out[0] - y) / cfg.batch_size;
            net.backward(dout);
            if (++in_batch == static_cast<std::size_t>(cfg.batch_size)) {
                opt.step(net);
                net.zero_grad();
                in_batch = 0;
            }
        }
        if (in_batch > 0) {
            opt.step(net);
            net.zero_grad();
        }
    }
    return Forecaster(target, cfg, std::move(net), train_end);
}

double mape(std::span<const double> predictions, std::span<const double> actuals, double floor) {
    if (predictions.size() != actuals.size())
        throw ContractViolation("mape: length mismatch");
    if (predictions.empty()) throw ContractViolation("mape: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        sum += std::abs(predictions[i] - actuals[i]) / std::max(actuals[i], floor);
    }
    return 100.0 * sum / static_cast<double>(predictions.size());
}

EvalResult evaluate_forecaster(Forecaster& fc, const data::TimeSeries& series, std::size_t begin,
                               std::size_t end, const env::GridConfig& grid) {
    if (begin < fc.train_end())
        throw ContractViolation("forecaster evaluation overlaps the training range");
    if (end > series.size() || begin >= end)
        throw ContractViolation("forecaster evaluation range invalid");

    std::vector<double> model, persistence, actual;
    model.reserve(end - begin);
    for (std::size_t t = begin; t < end; ++t) {
        model.push_back(fc.predict_at(series, t, grid));
        persistence.push_back(normalized_target(series, t - data::kHoursPerDay, fc.target(), grid));
        actual.push_back(normalized_target(series, t, fc.target(), grid));
    }
    EvalResult out;
    out.model_mape = mape(model, actual);
    out.persistence_mape = mape(persistence, actual);
    return out;
}

}  // namespace gridrl::forecast
