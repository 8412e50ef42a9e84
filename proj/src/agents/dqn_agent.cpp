#include "gridrl/agents/dqn_agent.hpp"

#include <algorithm>
#include <cmath>

#include "gridrl/nn/serialize.hpp"

namespace gridrl::agents {

AgentConfig AgentConfig::ddqn() {
    AgentConfig c;
    c.double_q = true;
    return c;
}

AgentConfig AgentConfig::d3qn() {
    AgentConfig c;
    c.double_q = true;
    c.dueling = true;
    return c;
}

AgentConfig AgentConfig::per_dqn() {
    AgentConfig c;
    c.per = true;
    return c;
}

AgentConfig AgentConfig::ms_dqn() {
    AgentConfig c;
    c.multistep = true;
    c.n_steps = 2;
    return c;
}

AgentConfig AgentConfig::nn_dqn() {
    AgentConfig c;
    c.noisy = true;
    return c;
}

AgentConfig AgentConfig::c51() {
    AgentConfig c;
    c.categorical = true;
    return c;
}

AgentConfig AgentConfig::rainbow() {
    AgentConfig c;
    c.double_q = c.dueling = c.per = c.multistep = c.noisy = c.categorical = true;
    c.n_steps = 1;  // larger backups hurt here
    c.per_offset = 1e-6;
    return c;
}

void AgentConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("agent config: gamma outside (0, 1]");
    if (!(v_min < v_max)) throw Error("agent config: need v_min < v_max");
    if (atoms < 2) throw Error("agent config: need at least 2 atoms");
    if (batch_size < 1 || n_steps < 1) throw Error("agent config: batch and n must be >= 1");
    if (replay_capacity < static_cast<std::size_t>(batch_size))
        throw Error("agent config: replay capacity below batch size");
    if (target_sync_period < 1) throw Error("agent config: sync period must be >= 1");
}

namespace {

nn::NetworkConfig make_net_config(const AgentConfig& cfg, int obs_size, int actions) {
    nn::NetworkConfig net;
    net.input_size = obs_size;
    net.actions = actions;
    net.atoms = cfg.categorical ? cfg.atoms : 1;
    net.hidden = cfg.hidden;
    net.dueling = cfg.dueling;
    net.noisy = cfg.noisy;
    net.sigma0 = cfg.sigma0;
    return net;
}

// per-component seed streams
constexpr std::uint64_t kNetStream = 1;
constexpr std::uint64_t kActStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kNoiseStream = 4;

}  // namespace

DqnAgent::DqnAgent(AgentConfig cfg, int obs_size, int num_actions, std::uint64_t master_seed)
    : cfg_(cfg),
      actions_(num_actions),
      discount_n_(std::pow(cfg.gamma, cfg.effective_n_steps())),
      online_(make_net_config(cfg, obs_size, num_actions), split_seed(master_seed, kNetStream)),
      target_(make_net_config(cfg, obs_size, num_actions), split_seed(master_seed, kNetStream)),
      opt_(online_.param_count(), cfg.lr),
      nstep_(cfg.effective_n_steps(), cfg.gamma),
      act_rng_(split_seed(master_seed, kActStream)),
      sample_rng_(split_seed(master_seed, kSampleStream)),
      noise_rng_(split_seed(master_seed, kNoiseStream)),
      eps_(cfg.eps_start) {
    cfg_.validate();
    if (cfg_.per) {
        prioritized_ = std::make_unique<PrioritizedReplay>(cfg_.replay_capacity, cfg_.per_alpha,
                                                           cfg_.per_beta, cfg_.per_offset);
    } else {
        uniform_ = std::make_unique<UniformReplay>(cfg_.replay_capacity);
    }
    if (cfg_.categorical) support_ = atom_support(cfg_.v_min, cfg_.v_max, cfg_.atoms);
    target_.copy_params_from(online_);

    dout_.resize(online_.config().output_size());
    probs_.resize(cfg_.categorical ? cfg_.atoms : 0);
    projected_.resize(cfg_.categorical ? cfg_.atoms : 0);
}

std::size_t DqnAgent::buffer_size() const {
    return cfg_.per ? prioritized_->size() : uniform_->size();
}

const Transition& DqnAgent::transition_at(std::size_t i) const {
    return cfg_.per ? prioritized_->at(i) : uniform_->at(i);
}

std::vector<double> DqnAgent::expected_values_from_logits(std::span<const double> logits) const {
    std::vector<double> ev(actions_);
    std::vector<double> probs(cfg_.atoms);
    for (int a = 0; a < actions_; ++a) {
        nn::softmax(logits.subspan(static_cast<std::size_t>(a) * cfg_.atoms, cfg_.atoms), probs);
        ev[a] = expected_value(probs, support_);
    }
    return ev;
}

std::vector<double> DqnAgent::action_values(std::span<const double> obs) {
    auto out = online_.forward(obs);
    if (cfg_.categorical) return expected_values_from_logits(out);
    return {out.begin(), out.end()};
}

std::vector<std::vector<double>> DqnAgent::value_distribution(std::span<const double> obs) {
    if (!cfg_.categorical)
        throw Error("value distribution requested from a non-distributional agent");
    auto out = online_.forward(obs);
    std::vector<std::vector<double>> dists(actions_, std::vector<double>(cfg_.atoms));
    for (int a = 0; a < actions_; ++a) {
        nn::softmax(out.subspan(static_cast<std::size_t>(a) * cfg_.atoms, cfg_.atoms), dists[a]);
    }
    return dists;
}

int DqnAgent::act(std::span<const double> obs, bool evaluation) {
    if (cfg_.noisy) {
        if (evaluation) {
            online_.clear_noise();
        } else {
            online_.sample_noise(noise_rng_);
        }
        last_act_noise_cleared_ = evaluation;
    } else {
        last_act_noise_cleared_ = true;  // nothing to clear
    }
    // noisy exploration replaces the epsilon schedule
    const double eps = (evaluation || cfg_.noisy) ? 0.0 : eps_;
    last_act_epsilon_ = eps;

    if (eps > 0.0 && act_rng_.uniform() < eps) return act_rng_.uniform_int(actions_);
    const auto values = action_values(obs);
    return argmax_index(values);
}

void DqnAgent::observe(const std::vector<double>& state, int action, double reward,
                       const std::vector<double>& next_state) {
    if (cfg_.reward_clip) reward = std::clamp(reward, -1.0, 1.0);
    auto done = nstep_.push(state, action, reward, next_state);
    if (!done) return;
    if (cfg_.per) {
        prioritized_->push(std::move(*done));
    } else {
        uniform_->push(std::move(*done));
    }
}

std::optional<double> DqnAgent::train_step() {
    std::optional<double> loss;
    if (warm()) loss = update_batch();

    eps_ = epsilon_decay(eps_, cfg_.eps_decay, cfg_.eps_min);
    ++env_steps_;
    if (env_steps_ % cfg_.target_sync_period == 0) target_.copy_params_from(online_);
    return loss;
}

double DqnAgent::update_batch() {
    const std::size_t batch = static_cast<std::size_t>(cfg_.batch_size);

    std::vector<std::size_t> indices;
    std::vector<double> weights;
    if (cfg_.per) {
        if (cfg_.per_beta_anneal) {
            const double frac = std::min(
                1.0, static_cast<double>(env_steps_) / cfg_.per_beta_anneal_steps);
            prioritized_->set_beta(cfg_.per_beta + (1.0 - cfg_.per_beta) * frac);
        }
        auto s = prioritized_->sample(batch, sample_rng_);
        indices = std::move(s.indices);
        weights = std::move(s.weights);
    } else {
        indices = uniform_->sample_indices(batch, sample_rng_);
        weights.assign(batch, 1.0);
    }

    if (cfg_.noisy) {
        online_.sample_noise(noise_rng_);
        target_.sample_noise(noise_rng_);
    }

    online_.zero_grad();
    const double inv_b = 1.0 / static_cast<double>(batch);
    double total_loss = 0.0;
    std::vector<double> errors(batch);

    for (std::size_t k = 0; k < batch; ++k) {
        const Transition& t = transition_at(indices[k]);
        const double w = weights[k];

        if (cfg_.categorical) {
            int a_star = -1;
            if (cfg_.double_q) {
                auto online_next = online_.forward(t.next_state);
                a_star = argmax_index(expected_values_from_logits(online_next));
            }
            auto target_next = target_.forward(t.next_state);
            if (!cfg_.double_q) a_star = argmax_index(expected_values_from_logits(target_next));
            nn::softmax(
                target_next.subspan(static_cast<std::size_t>(a_star) * cfg_.atoms, cfg_.atoms),
                probs_);
            categorical_projection(probs_, t.reward, discount_n_, support_, projected_);

            auto out = online_.forward(t.state);
            const std::size_t base = static_cast<std::size_t>(t.action) * cfg_.atoms;
            nn::softmax(out.subspan(base, cfg_.atoms), probs_);
            const double kl = kl_divergence(projected_, probs_);

            std::fill(dout_.begin(), dout_.end(), 0.0);
            for (int i = 0; i < cfg_.atoms; ++i) {
                dout_[base + i] = (probs_[i] - projected_[i]) * w * inv_b;
            }
            online_.backward(dout_);
            errors[k] = kl;
            total_loss += w * kl;
        } else {
            int a_star = -1;
            if (cfg_.double_q) {
                auto online_next = online_.forward(t.next_state);
                a_star = argmax_index(online_next);
            }
            auto target_next = target_.forward(t.next_state);
            const double y = cfg_.double_q
                                 ? t.reward + discount_n_ * target_next[a_star]
                                 : dqn_target(t.reward, discount_n_, target_next);

            auto q = online_.forward(t.state);
            const double delta = y - q[t.action];

            std::fill(dout_.begin(), dout_.end(), 0.0);
            dout_[t.action] = 2.0 * (q[t.action] - y) * w * inv_b;
            online_.backward(dout_);
            errors[k] = delta;
            total_loss += w * delta * delta;
        }
    }

    if (cfg_.grad_clip) {
        double norm_sq = 0.0;
        online_.visit_params_grads([&](double&, double& g) { norm_sq += g * g; });
        const double norm = std::sqrt(norm_sq);
        if (norm > cfg_.grad_clip_norm) {
            const double scale = cfg_.grad_clip_norm / norm;
            online_.visit_params_grads([&](double&, double& g) { g *= scale; });
        }
    }
    opt_.step(online_);

    if (cfg_.per) prioritized_->update_priorities(indices, errors);
    return total_loss * inv_b;
}

void DqnAgent::save_checkpoint(const std::string& path) { nn::save_params(online_, path); }

void DqnAgent::load_checkpoint(const std::string& path) {
    nn::load_params(online_, path);
    target_.copy_params_from(online_);
}

}  // namespace gridrl::agents
