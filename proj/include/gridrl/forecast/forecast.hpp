#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridrl/data/time_series.hpp"
#include "gridrl/env/grid_config.hpp"
#include "gridrl/nn/network.hpp"

namespace gridrl::forecast {

enum class Target { Demand, Price, Pv, Wt };

const char* target_name(Target t);
Target parse_target(const std::string& name);

struct ForecastConfig {
    int window = 24;        // previous hours fed as input
    int hidden = 32;
    int epochs = 50;
    int batch_size = 32;
    double lr = 0.001;
    int train_weeks = 100;  // weeks 1..100 train, the rest evaluate
};

/// Normalized [0,1] value of one target quantity at hour t. PV and WT are
/// the generation outputs implied by the weather record.
double normalized_target(const data::TimeSeries& series, std::size_t t, Target target,
                         const env::GridConfig& grid);

/// Sliding-window features for predicting hour t: the previous `window`
/// normalized target values, plus (for demand and price) temperature,
/// humidity and clearness at the forecast hour. Throws on t < window.
std::vector<double> build_features(const data::TimeSeries& series, std::size_t t, Target target,
                                   const env::GridConfig& grid, int window = 24);

/// Input width for a target kind: window (+3 weather features for
/// demand/price).
int feature_size(Target target, int window = 24);

/// Next-hour regressor for one quantity, trained on the first train_weeks
/// of the series only. Immutable after training.
class Forecaster {
public:
    Forecaster(Target target, ForecastConfig cfg, nn::Network net, std::size_t train_end);

    /// Clamped to [0,1], the observation-space contract.
    double predict(std::span<const double> features);

    /// Convenience: features built from the series at hour t.
    double predict_at(const data::TimeSeries& series, std::size_t t, const env::GridConfig& grid);

    Target target() const { return target_; }
    const ForecastConfig& config() const { return cfg_; }
    /// First hour index outside the training range.
    std::size_t train_end() const { return train_end_; }
    nn::Network& net() { return net_; }

    void save(const std::string& path);

private:
    Target target_;
    ForecastConfig cfg_;
    nn::Network net_;
    std::size_t train_end_;
};

/// MSE regression over the training split; deterministic per seed.
/// Throws if the series is shorter than the training split.
Forecaster train_forecaster(const data::TimeSeries& series, Target target,
                            const ForecastConfig& cfg, const env::GridConfig& grid,
                            std::uint64_t seed);

/// 100 * mean(|p - a| / max(a, floor)).
double mape(std::span<const double> predictions, std::span<const double> actuals,
            double floor = 1e-3);

/// MAPE of the trained model and of the 24-hour persistence baseline over
/// [begin, end). Evaluation refuses to dip into the training range.
struct EvalResult {
    double model_mape = 0.0;
    double persistence_mape = 0.0;
};
EvalResult evaluate_forecaster(Forecaster& fc, const data::TimeSeries& series, std::size_t begin,
                               std::size_t end, const env::GridConfig& grid);

}  // namespace gridrl::forecast
