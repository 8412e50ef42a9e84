#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridrl/errors.hpp"
#include "gridrl/rng.hpp"

namespace gridrl::nn {

enum class Activation { Identity, Relu, Tanh };

/// Per-action mean-advantage recombination:
///   out[a, k] = v[k] + adv[a, k] - mean_a adv[a, k]
/// Works per atom; atoms = 1 recovers the scalar dueling head.
void dueling_combine(std::span<const double> value, std::span<const double> advantage,
                     int actions, int atoms, std::span<double> out);

/// Gradient of dueling_combine: given dL/dout, fills dL/dvalue and dL/dadv.
void dueling_combine_backward(std::span<const double> dout, int actions, int atoms,
                              std::span<double> dvalue, std::span<double> dadvantage);

/// Max-stabilized softmax.
void softmax(std::span<const double> logits, std::span<double> probs);

/// One affine layer, optionally carrying factorized Gaussian noise:
///   y = (mu_w + sigma_w . eps_w) x + mu_b + sigma_b . eps_b
/// with eps_w[i][j] = f(eps_out[i]) f(eps_in[j]), f(t) = sign(t) sqrt|t|.
/// Cleared noise makes the layer the plain affine map of the mu parameters.
class Layer {
public:
    Layer(int in, int out, Activation act, bool noisy, double sigma0, Rng& init);

    int in_size() const { return in_; }
    int out_size() const { return out_; }
    bool noisy() const { return noisy_; }

    /// Caches input and preactivation for a subsequent backward().
    void forward(std::span<const double> x, std::span<double> y);

    /// Accumulates parameter gradients; writes dL/dx into dx (may be empty
    /// for the first layer).
    void backward(std::span<const double> dy, std::span<double> dx);

    void zero_grad();
    void sample_noise(Rng& rng);
    void clear_noise();

    template <typename Fn>
    void visit_params(Fn&& fn) {
        for (auto& v : mu_w_) fn(v);
        for (auto& v : mu_b_) fn(v);
        for (auto& v : sigma_w_) fn(v);
        for (auto& v : sigma_b_) fn(v);
    }
    template <typename Fn>
    void visit_params_grads(Fn&& fn) {
        for (std::size_t i = 0; i < mu_w_.size(); ++i) fn(mu_w_[i], g_mu_w_[i]);
        for (std::size_t i = 0; i < mu_b_.size(); ++i) fn(mu_b_[i], g_mu_b_[i]);
        for (std::size_t i = 0; i < sigma_w_.size(); ++i) fn(sigma_w_[i], g_sigma_w_[i]);
        for (std::size_t i = 0; i < sigma_b_.size(); ++i) fn(sigma_b_[i], g_sigma_b_[i]);
    }
    std::size_t param_count() const {
        return mu_w_.size() + mu_b_.size() + sigma_w_.size() + sigma_b_.size();
    }

private:
    double weight(int i, int j) const {
        double w = mu_w_[static_cast<std::size_t>(i) * in_ + j];
        if (noisy_) w += sigma_w_[static_cast<std::size_t>(i) * in_ + j] * feps_out_[i] * feps_in_[j];
        return w;
    }

    int in_, out_;
    Activation act_;
    bool noisy_;

    std::vector<double> mu_w_, mu_b_, sigma_w_, sigma_b_;
    std::vector<double> g_mu_w_, g_mu_b_, g_sigma_w_, g_sigma_b_;
    std::vector<double> feps_in_, feps_out_;  // f(eps), zero when cleared

    std::vector<double> cached_x_, cached_z_;
    bool have_forward_ = false;
};

struct NetworkConfig {
    int input_size = 8;
    int actions = 5;
    int atoms = 1;  // 1 = scalar Q output, >1 = categorical logits
    std::vector<int> hidden = {64, 64};
    bool dueling = false;
    bool noisy = false;
    double sigma0 = 0.5;

    int output_size() const { return actions * atoms; }
    bool operator==(const NetworkConfig&) const = default;
};

/// Fixed-topology MLP with reverse-mode gradients. Either a plain chain
/// (encoder + linear head) or a dueling pair of heads over a shared encoder.
class Network {
public:
    Network(NetworkConfig cfg, std::uint64_t init_seed);

    /// Returns per-action outputs: q[a] for atoms = 1, otherwise logits laid
    /// out action-major (a * atoms + k). The result stays valid until the
    /// next forward.
    std::span<const double> forward(std::span<const double> input);

    /// Propagates dL/d(output) back through the net, accumulating parameter
    /// gradients. Returns dL/d(input). Requires a preceding forward().
    std::span<const double> backward(std::span<const double> doutput);

    void zero_grad();
    void sample_noise(Rng& rng);
    void clear_noise();

    std::size_t param_count() const;
    template <typename Fn>
    void visit_params(Fn&& fn) {
        for (auto& l : encoder_) l.visit_params(fn);
        if (cfg_.dueling) {
            value_head_->visit_params(fn);
            adv_head_->visit_params(fn);
        } else {
            head_->visit_params(fn);
        }
    }
    template <typename Fn>
    void visit_params_grads(Fn&& fn) {
        for (auto& l : encoder_) l.visit_params_grads(fn);
        if (cfg_.dueling) {
            value_head_->visit_params_grads(fn);
            adv_head_->visit_params_grads(fn);
        } else {
            head_->visit_params_grads(fn);
        }
    }

    std::vector<double> flatten_params();
    void unflatten_params(std::span<const double> flat);

    void copy_params_from(Network& other);
    void soft_update_from(Network& other, double tau);

    const NetworkConfig& config() const { return cfg_; }

private:
    NetworkConfig cfg_;
    std::vector<Layer> encoder_;
    std::vector<Layer> head_storage_;  // plain head, or value + advantage heads
    Layer* head_ = nullptr;
    Layer* value_head_ = nullptr;
    Layer* adv_head_ = nullptr;

    // activation buffers, one per encoder boundary
    std::vector<std::vector<double>> acts_;
    std::vector<double> value_out_, adv_out_, output_;
    std::vector<double> dvalue_, dadv_, input_grad_;
    std::vector<std::vector<double>> dacts_;
    bool have_forward_ = false;
};

}  // namespace gridrl::nn
