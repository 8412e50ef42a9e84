#pragma once

#include <memory>
#include <optional>
#include <string>

#include "gridrl/agents/categorical.hpp"
#include "gridrl/agents/replay.hpp"
#include "gridrl/agents/targets.hpp"
#include "gridrl/nn/adam.hpp"
#include "gridrl/nn/network.hpp"

namespace gridrl::agents {

/// Hyperparameters and feature flags of the DQN family. Every algorithm in
/// the family is this config with a different flag subset.
struct AgentConfig {
    double gamma = 0.99;
    double lr = 0.001;
    int batch_size = 64;

    double eps_start = 1.0;
    double eps_min = 0.01;
    double eps_decay = 5e-4;  // multiplicative, per step

    double per_alpha = 0.7;
    double per_beta = 0.5;
    double per_offset = 1e-3;
    bool per_beta_anneal = false;      // beta -> 1 over anneal_steps when enabled
    long per_beta_anneal_steps = 16800;

    int n_steps = 1;
    double sigma0 = 0.5;

    int atoms = 51;
    double v_min = -10.0;
    double v_max = 10.0;

    int target_sync_period = 200;  // environment steps between hard target copies
    std::size_t replay_capacity = 50000;
    std::vector<int> hidden = {64, 64};

    // feature flags
    bool double_q = false;
    bool dueling = false;
    bool per = false;
    bool multistep = false;
    bool noisy = false;
    bool categorical = false;

    // off by default: neither helped in this domain
    bool grad_clip = false;
    double grad_clip_norm = 10.0;
    bool reward_clip = false;

    static AgentConfig dqn() { return {}; }
    static AgentConfig ddqn();
    static AgentConfig d3qn();
    static AgentConfig per_dqn();
    static AgentConfig ms_dqn();
    static AgentConfig nn_dqn();
    static AgentConfig c51();
    static AgentConfig rainbow();

    int effective_n_steps() const { return multistep ? n_steps : 1; }
    void validate() const;
};

/// The DQN family as one composable agent: DQN, DDQN, D3QN, PER-DQN, MS-DQN,
/// NN-DQN, C51 and Rainbow are flag subsets of the same train loop.
///
/// Per environment step the owner calls act / observe / train_step in that
/// order; train_step also runs the epsilon schedule and the periodic hard
/// target sync, mirroring the single training loop the flags compose into.
class DqnAgent {
public:
    DqnAgent(AgentConfig cfg, int obs_size, int num_actions, std::uint64_t master_seed);

    /// Epsilon-greedy (or noise-driven) action. Evaluation forces epsilon to
    /// 0 and clears layer noise; no randomness is consumed.
    int act(std::span<const double> obs, bool evaluation);

    /// Stores one environment transition (through the n-step window).
    void observe(const std::vector<double>& state, int action, double reward,
                 const std::vector<double>& next_state);

    /// One training iteration: sample / target / loss / optimizer step when
    /// the buffer is warm, then the epsilon schedule and target sync.
    /// Returns the batch loss when an update ran.
    std::optional<double> train_step();

    /// Per-action value estimates: Q(s, .) or the distribution expectations.
    std::vector<double> action_values(std::span<const double> obs);

    /// Per-action atom probabilities; only distributional agents support
    /// snapshots of Z(s, .).
    std::vector<std::vector<double>> value_distribution(std::span<const double> obs);

    double epsilon() const { return eps_; }
    long env_steps() const { return env_steps_; }
    std::size_t buffer_size() const;
    bool warm() const { return buffer_size() >= static_cast<std::size_t>(cfg_.batch_size); }
    const AgentConfig& config() const { return cfg_; }
    const std::vector<double>& atom_supports() const { return support_; }

    // evaluation-purity introspection
    double last_act_epsilon() const { return last_act_epsilon_; }
    bool last_act_noise_cleared() const { return last_act_noise_cleared_; }

    nn::Network& online_net() { return online_; }
    nn::Network& target_net() { return target_; }

    void save_checkpoint(const std::string& path);
    void load_checkpoint(const std::string& path);

private:
    double update_batch();
    const Transition& transition_at(std::size_t i) const;
    std::vector<double> expected_values_from_logits(std::span<const double> logits) const;

    AgentConfig cfg_;
    int actions_;
    double discount_n_;  // gamma^n for the bootstrap

    nn::Network online_, target_;
    nn::Adam opt_;
    std::unique_ptr<UniformReplay> uniform_;
    std::unique_ptr<PrioritizedReplay> prioritized_;
    MultistepAccumulator nstep_;
    std::vector<double> support_;

    Rng act_rng_, sample_rng_, noise_rng_;
    double eps_;
    long env_steps_ = 0;

    double last_act_epsilon_ = 1.0;
    bool last_act_noise_cleared_ = false;

    // scratch buffers
    std::vector<double> dout_, probs_, projected_;
};

}  // namespace gridrl::agents
