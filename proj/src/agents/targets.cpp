#include "gridrl/agents/targets.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gridrl::agents {

double dqn_target(double reward, double discount, std::span<const double> q_next_target) {
    return reward + discount * *std::max_element(q_next_target.begin(), q_next_target.end());
}

double ddqn_target(double reward, double discount, std::span<const double> q_next_online,
                   std::span<const double> q_next_target) {
    const int a_star = argmax_index(q_next_online);
    return reward + discount * q_next_target[a_star];
}

double epsilon_decay(double eps, double decay, double eps_min) {
    if (eps <= eps_min) return eps_min;
    return std::max((1.0 - decay) * eps, eps_min);
}

int argmax_index(std::span<const double> values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

int select_action(std::span<const double> values, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) {
        return rng.uniform_int(static_cast<int>(values.size()));
    }
    return argmax_index(values);
}

MultistepAccumulator::MultistepAccumulator(int n_steps, double gamma)
    : n_(n_steps), gamma_(gamma), discount_n_(std::pow(gamma, n_steps)) {
    if (n_ < 1) throw Error("multistep: n must be >= 1");
}

std::optional<Transition> MultistepAccumulator::push(std::vector<double> state, int action,
                                                     double reward,
                                                     const std::vector<double>& next_state) {
    window_.push_back({std::move(state), action, reward});
    if (static_cast<int>(window_.size()) < n_) return std::nullopt;

    Transition t;
    t.state = window_.front().state;
    t.action = window_.front().action;
    double ret = 0.0;
    double scale = 1.0;
    for (const auto& e : window_) {
        ret += scale * e.reward;
        scale *= gamma_;
    }
    t.reward = ret;
    t.next_state = next_state;
    window_.pop_front();
    return t;
}

}  // namespace gridrl::agents
