#pragma once

#include <optional>

#include "gridrl/nn/adam.hpp"
#include "gridrl/nn/network.hpp"

namespace gridrl::baselines {

struct DdpgConfig {
    double gamma = 0.99;
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double tau = 0.005;       // soft target blend per update
    double noise_std = 0.1;   // exploration noise, fraction of X_max
    int batch_size = 64;
    std::size_t replay_capacity = 50000;
    std::vector<int> hidden = {64, 64};
};

/// Continuous transition: the stored action is the executed power in MW.
struct ContinuousTransition {
    std::vector<double> state;
    double action_mw = 0.0;
    double reward = 0.0;
    std::vector<double> next_state;
};

/// Deterministic actor-critic benchmark. The actor emits a tanh-squashed
/// setpoint scaled to +-X_max; Gaussian noise is added during exploration.
class DdpgAgent {
public:
    DdpgAgent(DdpgConfig cfg, int obs_size, double x_max, std::uint64_t master_seed);

    double act(std::span<const double> obs, bool explore);
    void observe(ContinuousTransition t);

    struct Losses {
        double critic = 0.0;
        double actor = 0.0;
    };
    std::optional<Losses> train_step();

    bool warm() const { return buffer_.size() >= static_cast<std::size_t>(cfg_.batch_size); }
    std::size_t buffer_size() const { return buffer_.size(); }
    const DdpgConfig& config() const { return cfg_; }
    double x_max() const { return x_max_; }

    nn::Network& actor() { return actor_; }
    nn::Network& critic() { return critic_; }
    nn::Network& actor_target() { return actor_target_; }
    nn::Network& critic_target() { return critic_target_; }

    /// Deterministic policy output without noise; exposed for tests.
    double policy(nn::Network& actor_net, std::span<const double> obs);

private:
    double critic_value(nn::Network& critic_net, std::span<const double> obs, double action_mw);

    DdpgConfig cfg_;
    int obs_size_;
    double x_max_;

    nn::Network actor_, actor_target_, critic_, critic_target_;
    nn::Adam actor_opt_, critic_opt_;

    struct Buffer {
        std::size_t capacity = 0;
        std::size_t write = 0;
        std::vector<ContinuousTransition> items;
        void push(ContinuousTransition t);
        std::size_t size() const { return items.size(); }
    } buffer_;

    Rng act_rng_, sample_rng_;
    std::vector<double> critic_in_;
};

}  // namespace gridrl::baselines
