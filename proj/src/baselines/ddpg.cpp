#include "gridrl/baselines/ddpg.hpp"

#include <algorithm>
#include <cmath>

namespace gridrl::baselines {

namespace {

nn::NetworkConfig mlp(int in, int out, const std::vector<int>& hidden) {
    nn::NetworkConfig cfg;
    cfg.input_size = in;
    cfg.actions = out;
    cfg.atoms = 1;
    cfg.hidden = hidden;
    return cfg;
}

constexpr std::uint64_t kActorStream = 21;
constexpr std::uint64_t kCriticStream = 22;
constexpr std::uint64_t kActStream = 23;
constexpr std::uint64_t kSampleStream = 24;

}  // namespace

void DdpgAgent::Buffer::push(ContinuousTransition t) {
    if (items.size() < capacity) {
        items.push_back(std::move(t));
    } else {
        items[write] = std::move(t);
    }
    write = (write + 1) % capacity;
}

DdpgAgent::DdpgAgent(DdpgConfig cfg, int obs_size, double x_max, std::uint64_t master_seed)
    : cfg_(cfg),
      obs_size_(obs_size),
      x_max_(x_max),
      actor_(mlp(obs_size, 1, cfg.hidden), split_seed(master_seed, kActorStream)),
      actor_target_(mlp(obs_size, 1, cfg.hidden), split_seed(master_seed, kActorStream)),
      critic_(mlp(obs_size + 1, 1, cfg.hidden), split_seed(master_seed, kCriticStream)),
      critic_target_(mlp(obs_size + 1, 1, cfg.hidden), split_seed(master_seed, kCriticStream)),
      actor_opt_(actor_.param_count(), cfg.actor_lr),
      critic_opt_(critic_.param_count(), cfg.critic_lr),
      act_rng_(split_seed(master_seed, kActStream)),
      sample_rng_(split_seed(master_seed, kSampleStream)),
      critic_in_(obs_size + 1) {
    buffer_.capacity = cfg_.replay_capacity;
    actor_target_.copy_params_from(actor_);
    critic_target_.copy_params_from(critic_);
}

double DdpgAgent::policy(nn::Network& actor_net, std::span<const double> obs) {
    auto out = actor_net.forward(obs);
    return std::tanh(out[0]) * x_max_;
}

double DdpgAgent::critic_value(nn::Network& critic_net, std::span<const double> obs,
                               double action_mw) {
    std::copy(obs.begin(), obs.end(), critic_in_.begin());
    critic_in_.back() = action_mw / x_max_;  // action fed on the same scale as the state
    return critic_net.forward(critic_in_)[0];
}

double DdpgAgent::act(std::span<const double> obs, bool explore) {
    double a = policy(actor_, obs);
    if (explore && cfg_.noise_std > 0.0) {
        a += act_rng_.gaussian(0.0, cfg_.noise_std * x_max_);
    }
    return std::clamp(a, -x_max_, x_max_);
}

void DdpgAgent::observe(ContinuousTransition t) { buffer_.push(std::move(t)); }

std::optional<DdpgAgent::Losses> DdpgAgent::train_step() {
    if (!warm()) return std::nullopt;
    const std::size_t batch = static_cast<std::size_t>(cfg_.batch_size);
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx)
        i = static_cast<std::size_t>(sample_rng_.uniform_int(static_cast<int>(buffer_.size())));

    Losses losses;
    const double inv_b = 1.0 / static_cast<double>(batch);
    std::vector<double> dout(1);

    // critic regression towards r + gamma * Q_target(s', actor_target(s'))
    critic_.zero_grad();
    for (std::size_t i : idx) {
        const auto& t = buffer_.items[i];
        const double a_next = policy(actor_target_, t.next_state);
        const double y = t.reward + cfg_.gamma * critic_value(critic_target_, t.next_state, a_next);
        const double q = critic_value(critic_, t.state, t.action_mw);
        const double delta = q - y;
        losses.critic += delta * delta * inv_b;
        dout[0] = 2.0 * delta * inv_b;
        critic_.backward(dout);
    }
    critic_opt_.step(critic_);

    // actor ascends the critic: dQ/da flows through the critic input
    actor_.zero_grad();
    for (std::size_t i : idx) {
        const auto& t = buffer_.items[i];
        auto pre = actor_.forward(t.state);
        const double squashed = std::tanh(pre[0]);
        const double a = squashed * x_max_;
        const double q = critic_value(critic_, t.state, a);
        losses.actor += -q * inv_b;
        dout[0] = -1.0;  // maximize Q
        auto dinput = critic_.backward(dout);
        const double dq_da_norm = dinput.back();  // critic input carries a / x_max
        dout[0] = -dq_da_norm * (1.0 - squashed * squashed) * inv_b;
        actor_.backward(dout);
    }
    actor_opt_.step(actor_);
    critic_.zero_grad();  // discard the actor pass's gradient residue

    actor_target_.soft_update_from(actor_, cfg_.tau);
    critic_target_.soft_update_from(critic_, cfg_.tau);
    return losses;
}

}  // namespace gridrl::baselines
