#include <doctest.h>

#include <cmath>

#include "gridrl/baselines/ddpg.hpp"
#include "gridrl/nn/gradient_check.hpp"

using namespace gridrl;
using namespace gridrl::baselines;

namespace {

DdpgConfig small_config() {
    DdpgConfig cfg;
    cfg.hidden = {8, 8};
    cfg.batch_size = 16;
    return cfg;
}

std::vector<double> obs8(double fill) { return std::vector<double>(8, fill); }

}  // namespace

TEST_CASE("actor output always respects the power bounds") {
    DdpgAgent agent(small_config(), 8, 2.0, 7);
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> obs(8);
        for (auto& v : obs) v = rng.uniform(0.0, 1.0);
        CHECK(std::abs(agent.act(obs, true)) <= 2.0);
        CHECK(std::abs(agent.act(obs, false)) <= 2.0);
    }
}

TEST_CASE("a saturated actor pins the output at +X_max") {
    DdpgAgent agent(small_config(), 8, 2.0, 7);
    auto flat = agent.actor().flatten_params();
    flat.back() = 100.0;  // final bias dominates the pre-activation
    agent.actor().unflatten_params(flat);
    CHECK(agent.act(obs8(0.5), false) == doctest::Approx(2.0));
}

TEST_CASE("deterministic path: no exploration, or zero noise scale") {
    DdpgAgent a(small_config(), 8, 2.0, 11);
    const double first = a.act(obs8(0.3), false);
    CHECK(a.act(obs8(0.3), false) == first);

    DdpgConfig noiseless = small_config();
    noiseless.noise_std = 0.0;
    DdpgAgent b(noiseless, 8, 2.0, 11);
    CHECK(b.act(obs8(0.3), true) == b.act(obs8(0.3), false));

    // with noise on, exploration perturbs the action
    DdpgAgent c(small_config(), 8, 2.0, 11);
    CHECK(c.act(obs8(0.3), true) != c.act(obs8(0.3), false));
}

TEST_CASE("critic gradients agree with finite differences") {
    DdpgAgent agent(small_config(), 4, 2.0, 13);
    Rng rng(5);
    std::vector<double> input(5);  // obs(4) + action
    for (auto& v : input) v = rng.uniform(-1.0, 1.0);
    const auto loss = [](std::span<const double> out, std::span<double> grad) {
        grad[0] = 2.0 * (out[0] - 0.7);
        return (out[0] - 0.7) * (out[0] - 0.7);
    };
    CHECK(nn::gradient_check(agent.critic(), loss, input) <= 1e-4);
}

TEST_CASE("with gamma 0 the critic regresses to the immediate reward") {
    DdpgConfig cfg = small_config();
    cfg.gamma = 0.0;
    cfg.critic_lr = 3e-3;
    DdpgAgent agent(cfg, 4, 2.0, 17);

    ContinuousTransition t;
    t.state = {0.2, 0.4, 0.6, 0.8};
    t.action_mw = 1.0;
    t.reward = 0.5;
    t.next_state = {0.1, 0.1, 0.1, 0.1};
    for (int i = 0; i < cfg.batch_size; ++i) agent.observe(t);

    double critic_loss = 1.0;
    for (int i = 0; i < 2000; ++i) {
        const auto losses = agent.train_step();
        REQUIRE(losses.has_value());
        critic_loss = losses->critic;
    }
    CHECK(critic_loss < 1e-3);  // Q(s, a) ~= r
}

TEST_CASE("training reduces the critic loss on a stationary batch") {
    DdpgConfig cfg = small_config();
    DdpgAgent agent(cfg, 4, 2.0, 19);
    Rng rng(23);
    for (int i = 0; i < 64; ++i) {
        ContinuousTransition t;
        t.state = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
        t.action_mw = rng.uniform(-2.0, 2.0);
        t.reward = 0.1 * t.action_mw;  // reward increases with the action
        t.next_state = t.state;
        agent.observe(std::move(t));
    }
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto losses = agent.train_step();
        REQUIRE(losses.has_value());
        if (i == 0) first = losses->critic;
        last = losses->critic;
    }
    CHECK(last < first);
}

TEST_CASE("soft updates blend the target networks") {
    DdpgConfig cfg = small_config();
    cfg.tau = 1.0;  // degenerate case: hard copy
    DdpgAgent agent(cfg, 4, 2.0, 29);
    Rng rng(31);
    for (int i = 0; i < cfg.batch_size; ++i) {
        ContinuousTransition t;
        t.state = {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
        t.action_mw = rng.uniform(-2.0, 2.0);
        t.reward = rng.uniform();
        t.next_state = t.state;
        agent.observe(std::move(t));
    }
    agent.train_step();
    CHECK(agent.actor_target().flatten_params() == agent.actor().flatten_params());
    CHECK(agent.critic_target().flatten_params() == agent.critic().flatten_params());
}
