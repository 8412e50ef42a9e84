#pragma once

#include <deque>
#include <optional>
#include <span>

#include "gridrl/agents/replay.hpp"

namespace gridrl::agents {

/// y = r + gamma * max_a Q_target(s', a).
double dqn_target(double reward, double discount, std::span<const double> q_next_target);

/// Decoupled variant: the online net picks the next action, the target net
/// evaluates it.
double ddqn_target(double reward, double discount, std::span<const double> q_next_online,
                   std::span<const double> q_next_target);

/// Multiplicative schedule: eps <- (1 - decay) * eps while above the floor.
double epsilon_decay(double eps, double decay, double eps_min);

/// Greedy argmax with ties broken toward the lowest index.
int argmax_index(std::span<const double> values);

/// Epsilon-greedy selection over per-action value estimates.
int select_action(std::span<const double> values, double epsilon, Rng& rng);

/// Rolls (s, a, r) triples into n-step transitions:
///   reward = sum_{k<n} gamma^k r_{t+k}, next_state = s_{t+n}.
/// n = 1 reproduces the ordinary 1-step transition. There are no terminal
/// states, so the window simply slides across episode boundaries.
class MultistepAccumulator {
public:
    MultistepAccumulator(int n_steps, double gamma);

    /// Feeds one environment step; returns the completed n-step transition
    /// once the window is full.
    std::optional<Transition> push(std::vector<double> state, int action, double reward,
                                   const std::vector<double>& next_state);

    int n_steps() const { return n_; }
    /// gamma^n, the bootstrap discount matching the accumulated return.
    double bootstrap_discount() const { return discount_n_; }
    std::size_t pending() const { return window_.size(); }
    void clear() { window_.clear(); }

private:
    struct Entry {
        std::vector<double> state;
        int action;
        double reward;
    };
    int n_;
    double gamma_, discount_n_;
    std::deque<Entry> window_;
};

}  // namespace gridrl::agents
