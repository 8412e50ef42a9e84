#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gridrl/nn/network.hpp"

namespace gridrl::nn {

/// Adaptive-moment optimizer with bias correction.
class Adam {
public:
    explicit Adam(std::size_t param_count, double lr = 1e-3, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(param_count, 0.0),
          v_(param_count, 0.0) {}

    /// One update over the network's parameters, consuming its accumulated
    /// gradients. Parameter order is the network's visit order.
    void step(Network& net) {
        begin_step(net.param_count());
        std::size_t i = 0;
        net.visit_params_grads([&](double& p, double& g) { update_one(i++, p, g); });
    }

    /// Raw-span variant for fixtures and simple regressors.
    void step(std::span<double> params, std::span<const double> grads) {
        begin_step(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) update_one(i, params[i], grads[i]);
    }

    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }
    long step_count() const { return t_; }

private:
    void begin_step(std::size_t n) {
        if (n != m_.size()) throw Error("adam: parameter count mismatch");
        ++t_;
        bias1_ = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        bias2_ = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    }

    void update_one(std::size_t i, double& p, double g) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
        const double mhat = m_[i] / bias1_;
        const double vhat = v_[i] / bias2_;
        p -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }

    double lr_, beta1_, beta2_, eps_;
    double bias1_ = 1.0, bias2_ = 1.0;
    long t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace gridrl::nn
