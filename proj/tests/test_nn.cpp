#include <doctest.h>

#include <cmath>

#include "gridrl/agents/categorical.hpp"
#include "gridrl/nn/adam.hpp"
#include "gridrl/nn/gradient_check.hpp"
#include "gridrl/nn/network.hpp"
#include "gridrl/nn/serialize.hpp"
#include "test_util.hpp"

using namespace gridrl;
using namespace gridrl::nn;

namespace {

NetworkConfig plain(int in, int out, std::vector<int> hidden = {}) {
    NetworkConfig cfg;
    cfg.input_size = in;
    cfg.actions = out;
    cfg.hidden = std::move(hidden);
    return cfg;
}

LossFn mse_loss(std::vector<double> target) {
    return [target](std::span<const double> out, std::span<double> grad) {
        double loss = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = out[i] - target[i];
            loss += d * d;
            grad[i] = 2.0 * d;
        }
        return loss;
    };
}

}  // namespace

TEST_CASE("single dense layer matches the hand-computed affine map") {
    Network net(plain(2, 2), 1);
    net.unflatten_params(std::vector<double>{1, 2, 3, 4, 0.5, -0.5});
    const std::vector<double> x{1.0, -1.0};
    auto y = net.forward(x);
    CHECK(y[0] == doctest::Approx(-0.5));
    CHECK(y[1] == doctest::Approx(-1.5));
}

TEST_CASE("two-layer relu net matches the hand computation") {
    Network net(plain(2, 2, {2}), 1);
    // encoder identity, head mixes the rectified activations
    net.unflatten_params(std::vector<double>{1, 0, 0, 1, 0, 0, /*head*/ 1, 1, 1, -1, 0, 0});
    const std::vector<double> x{2.0, -3.0};
    auto y = net.forward(x);
    CHECK(y[0] == doctest::Approx(2.0));
    CHECK(y[1] == doctest::Approx(2.0));
}

TEST_CASE("zero parameters give zero output") {
    Network net(plain(3, 4, {8}), 1);
    net.unflatten_params(std::vector<double>(net.param_count(), 0.0));
    const std::vector<double> x{0.3, -0.1, 0.9};
    for (double v : net.forward(x)) CHECK(v == 0.0);
}

TEST_CASE("linear regression gradient matches the closed form") {
    Network net(plain(3, 1), 7);
    const std::vector<double> x{0.4, -1.2, 2.0};
    const double target = 0.7;
    net.zero_grad();
    auto out = net.forward(x);
    const double pred = out[0];
    std::vector<double> dout{2.0 * (pred - target)};
    net.backward(dout);

    std::vector<double> grads;
    net.visit_params_grads([&](double&, double& g) { grads.push_back(g); });
    for (int j = 0; j < 3; ++j) {
        CHECK(grads[j] == doctest::Approx(2.0 * (pred - target) * x[j]).epsilon(1e-12));
    }
    CHECK(grads[3] == doctest::Approx(2.0 * (pred - target)).epsilon(1e-12));
}

TEST_CASE("gradient of an untouched parameter is zero") {
    Network net(plain(2, 3), 11);
    net.zero_grad();
    net.forward(std::vector<double>{1.0, 2.0});
    std::vector<double> dout{1.0, 0.0, 0.0};  // loss reads only output 0
    net.backward(dout);
    std::vector<double> grads;
    net.visit_params_grads([&](double&, double& g) { grads.push_back(g); });
    // weights of output row 1 and 2 never influence the loss
    CHECK(grads[2] == 0.0);
    CHECK(grads[3] == 0.0);
    CHECK(grads[4] == 0.0);
    CHECK(grads[5] == 0.0);
}

TEST_CASE("backward without forward is rejected") {
    Network net(plain(2, 2), 3);
    std::vector<double> dout{1.0, 1.0};
    CHECK_THROWS_AS(net.backward(dout), Error);
}

TEST_CASE("finite differences confirm gradients for every layer family") {
    Rng rng(2024);
    auto random_input = [&](int n) {
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        return x;
    };

    SUBCASE("plain dense + mse") {
        Network net(plain(5, 3, {8, 8}), 101);
        const auto err =
            gradient_check(net, mse_loss({0.2, -0.4, 1.0}), random_input(5));
        CHECK(err <= 1e-4);
    }
    SUBCASE("noisy layers + mse") {
        NetworkConfig cfg = plain(4, 2, {6});
        cfg.noisy = true;
        Network net(cfg, 102);
        Rng noise(55);
        net.sample_noise(noise);
        const auto err = gradient_check(net, mse_loss({0.5, 0.1}), random_input(4));
        CHECK(err <= 1e-4);
    }
    SUBCASE("dueling head + mse") {
        NetworkConfig cfg = plain(4, 3, {6});
        cfg.dueling = true;
        Network net(cfg, 103);
        const auto err = gradient_check(net, mse_loss({0.3, 0.0, -0.7}), random_input(4));
        CHECK(err <= 1e-4);
    }
    SUBCASE("dueling noisy categorical head + kl") {
        NetworkConfig cfg = plain(4, 2, {6});
        cfg.dueling = true;
        cfg.noisy = true;
        cfg.atoms = 5;
        Network net(cfg, 104);
        Rng noise(56);
        net.sample_noise(noise);

        const auto z = agents::atom_support(-1, 1, 5);
        std::vector<double> m{0.1, 0.2, 0.4, 0.2, 0.1};  // fixed projected target
        const int action = 1;
        LossFn kl = [&](std::span<const double> out, std::span<double> grad) {
            std::fill(grad.begin(), grad.end(), 0.0);
            std::vector<double> d(5);
            nn::softmax(out.subspan(action * 5, 5), d);
            for (int i = 0; i < 5; ++i) grad[action * 5 + i] = d[i] - m[i];
            return agents::kl_divergence(m, d);
        };
        const auto err = gradient_check(net, kl, random_input(4));
        CHECK(err <= 1e-4);
    }
}

TEST_CASE("zero input and zero target stay finite") {
    Network net(plain(3, 2, {4}), 9);
    const std::vector<double> x(3, 0.0);
    const auto err = gradient_check(net, mse_loss({0.0, 0.0}), x);
    CHECK(std::isfinite(err));
    CHECK(err <= 1e-4);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    std::vector<double> p{1.0, -2.0, 3.0};
    const auto before = p;
    Adam opt(3, 0.01);
    opt.step(p, std::vector<double>{0.0, 0.0, 0.0});
    CHECK(p == before);
}

TEST_CASE("adam: the bias-corrected first step is -lr * sign(g)") {
    std::vector<double> p{0.0, 0.0};
    Adam opt(2, 0.001);
    opt.step(p, std::vector<double>{0.5, -3.0});
    CHECK(p[0] == doctest::Approx(-0.001).epsilon(1e-4));
    CHECK(p[1] == doctest::Approx(0.001).epsilon(1e-4));
}

TEST_CASE("adam: constant gradient drives steps towards lr magnitude") {
    std::vector<double> p{0.0};
    Adam opt(1, 0.001);
    double prev = p[0];
    double step = 0.0;
    for (int i = 0; i < 5000; ++i) {
        opt.step(p, std::vector<double>{2.0});
        step = prev - p[0];
        prev = p[0];
    }
    CHECK(step == doctest::Approx(0.001).epsilon(0.01));
}

TEST_CASE("noise control: cleared noise is deterministic, zero sigma is noise-free") {
    NetworkConfig cfg = plain(3, 2, {4});
    cfg.noisy = true;
    Network net(cfg, 77);
    const std::vector<double> x{0.2, -0.5, 0.8};

    net.clear_noise();
    auto a = net.forward(x);
    const std::vector<double> a_copy(a.begin(), a.end());
    auto b = net.forward(x);
    CHECK(std::equal(a_copy.begin(), a_copy.end(), b.begin()));

    // zero all sigma parameters: output ignores any sampled noise
    std::size_t idx = 0;
    std::vector<std::size_t> layout;  // count mu params per layer to find sigmas
    Network zeroed(cfg, 77);
    // mu and sigma interleave per layer in visit order: mu_w, mu_b, sigma_w, sigma_b
    // simplest: zero sigma by matching against the twin net with cleared noise
    std::vector<double> flat = zeroed.flatten_params();
    // layer 1: 3*4 mu_w + 4 mu_b then 3*4+4 sigmas; layer 2: 4*2+2 then sigmas
    std::size_t pos = 0;
    auto zero_sigmas = [&](std::size_t mu, std::size_t sigma) {
        pos += mu;
        for (std::size_t i = 0; i < sigma; ++i) flat[pos + i] = 0.0;
        pos += sigma;
    };
    zero_sigmas(16, 16);
    zero_sigmas(10, 10);
    REQUIRE(pos == flat.size());
    zeroed.unflatten_params(flat);

    zeroed.clear_noise();
    auto clean = zeroed.forward(x);
    const std::vector<double> clean_copy(clean.begin(), clean.end());
    Rng noise(5);
    zeroed.sample_noise(noise);
    auto noisy_out = zeroed.forward(x);
    for (std::size_t i = 0; i < clean_copy.size(); ++i)
        CHECK(noisy_out[i] == doctest::Approx(clean_copy[i]).epsilon(1e-12));
    (void)idx;
    (void)layout;
}

TEST_CASE("sampled noise is reproducible per seed and changes the output") {
    NetworkConfig cfg = plain(3, 2, {4});
    cfg.noisy = true;
    const std::vector<double> x{0.3, 0.3, -0.9};

    Network n1(cfg, 31), n2(cfg, 31);
    Rng r1(9), r2(9);
    n1.sample_noise(r1);
    n2.sample_noise(r2);
    auto o1 = n1.forward(x);
    const std::vector<double> o1c(o1.begin(), o1.end());
    auto o2 = n2.forward(x);
    CHECK(std::equal(o1c.begin(), o1c.end(), o2.begin()));

    n2.clear_noise();
    auto o3 = n2.forward(x);
    bool same = true;
    for (std::size_t i = 0; i < o1c.size(); ++i) same = same && o1c[i] == o3[i];
    CHECK_FALSE(same);
}

TEST_CASE("dueling recombination centers the advantages") {
    std::vector<double> v{1.0};
    std::vector<double> adv{1.0, 3.0};
    std::vector<double> q(2);
    dueling_combine(v, adv, 2, 1, q);
    CHECK(q[0] == doctest::Approx(0.0));
    CHECK(q[1] == doctest::Approx(2.0));

    // adding a constant to every advantage changes nothing (identifiability)
    std::vector<double> shifted{1.0 + 5.5, 3.0 + 5.5};
    std::vector<double> q2(2);
    dueling_combine(v, shifted, 2, 1, q2);
    CHECK(q2[0] == q[0]);
    CHECK(q2[1] == q[1]);

    // constant advantages collapse to the state value
    std::vector<double> flat{2.0, 2.0};
    dueling_combine(v, flat, 2, 1, q2);
    CHECK(q2[0] == doctest::Approx(1.0));
    CHECK(q2[1] == doctest::Approx(1.0));
}

TEST_CASE("softmax: hand values, uniformity, overflow safety") {
    std::vector<double> out(2);
    softmax(std::vector<double>{0.0, std::log(3.0)}, out);
    CHECK(out[0] == doctest::Approx(0.25));
    CHECK(out[1] == doctest::Approx(0.75));

    std::vector<double> logits(51, 1.7);
    std::vector<double> uniform(51);
    softmax(logits, uniform);
    for (double p : uniform) CHECK(p == doctest::Approx(1.0 / 51).epsilon(1e-12));

    softmax(std::vector<double>{1000.0, 0.0}, out);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(std::isfinite(out[1]));
}

TEST_CASE("parameter checkpoints round-trip exactly") {
    testutil::TempDir tmp("ckpt");
    NetworkConfig cfg = plain(6, 3, {8});
    cfg.noisy = true;
    cfg.dueling = true;
    cfg.atoms = 7;
    Network net(cfg, 123);
    save_params(net, tmp.file("net.txt"));

    Network other(cfg, 456);
    load_params(other, tmp.file("net.txt"));
    const auto a = net.flatten_params();
    const auto b = other.flatten_params();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    // mismatched architecture is rejected
    Network wrong(plain(6, 3, {9}), 1);
    CHECK_THROWS_AS(load_params(wrong, tmp.file("net.txt")), Error);
    CHECK(peek_config(tmp.file("net.txt")) == cfg);
}

TEST_CASE("hard copy and soft update") {
    NetworkConfig cfg = plain(4, 2, {5});
    Network a(cfg, 1), b(cfg, 2);
    b.copy_params_from(a);
    CHECK(a.flatten_params() == b.flatten_params());

    Network c(cfg, 3);
    const auto before_c = c.flatten_params();
    const auto target = a.flatten_params();
    c.soft_update_from(a, 0.25);
    const auto after = c.flatten_params();
    for (std::size_t i = 0; i < after.size(); ++i) {
        CHECK(after[i] == doctest::Approx(0.75 * before_c[i] + 0.25 * target[i]).epsilon(1e-12));
    }
    // tau = 1 is a hard copy
    c.soft_update_from(a, 1.0);
    CHECK(c.flatten_params() == a.flatten_params());
}
