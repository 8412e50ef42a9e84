#include "gridrl/nn/network.hpp"

#include <algorithm>
#include <cmath>

namespace gridrl::nn {

void dueling_combine(std::span<const double> value, std::span<const double> advantage,
                     int actions, int atoms, std::span<double> out) {
    for (int k = 0; k < atoms; ++k) {
        double mean_adv = 0.0;
        for (int a = 0; a < actions; ++a) mean_adv += advantage[a * atoms + k];
        mean_adv /= actions;
        for (int a = 0; a < actions; ++a) {
            out[a * atoms + k] = value[k] + advantage[a * atoms + k] - mean_adv;
        }
    }
}

void dueling_combine_backward(std::span<const double> dout, int actions, int atoms,
                              std::span<double> dvalue, std::span<double> dadvantage) {
    for (int k = 0; k < atoms; ++k) {
        double sum = 0.0;
        for (int a = 0; a < actions; ++a) sum += dout[a * atoms + k];
        dvalue[k] = sum;
        const double mean = sum / actions;
        for (int a = 0; a < actions; ++a) {
            dadvantage[a * atoms + k] = dout[a * atoms + k] - mean;
        }
    }
}

void softmax(std::span<const double> logits, std::span<double> probs) {
    double max = logits[0];
    for (double v : logits) max = std::max(max, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - max);
        sum += probs[i];
    }
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] /= sum;
}

namespace {

double noise_transform(double t) { return (t < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(t)); }

double activate(Activation act, double z) {
    switch (act) {
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        default: return z;
    }
}

double activate_grad(Activation act, double z) {
    switch (act) {
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        default: return 1.0;
    }
}

}  // namespace

Layer::Layer(int in, int out, Activation act, bool noisy, double sigma0, Rng& init)
    : in_(in), out_(out), act_(act), noisy_(noisy) {
    const std::size_t n = static_cast<std::size_t>(in) * out;
    mu_w_.resize(n);
    mu_b_.resize(out);
    g_mu_w_.assign(n, 0.0);
    g_mu_b_.assign(out, 0.0);

    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (auto& w : mu_w_) w = init.uniform(-bound, bound);
    for (auto& b : mu_b_) b = init.uniform(-bound, bound);

    if (noisy_) {
        sigma_w_.assign(n, sigma0 * bound);
        sigma_b_.assign(out, sigma0 * bound);
        g_sigma_w_.assign(n, 0.0);
        g_sigma_b_.assign(out, 0.0);
        feps_in_.assign(in, 0.0);
        feps_out_.assign(out, 0.0);
    }
    cached_x_.resize(in);
    cached_z_.resize(out);
}

void Layer::forward(std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) != in_) throw Error("layer forward: input size mismatch");
    std::copy(x.begin(), x.end(), cached_x_.begin());
    for (int i = 0; i < out_; ++i) {
        double z = mu_b_[i];
        if (noisy_) z += sigma_b_[i] * feps_out_[i];
        const double* wrow = mu_w_.data() + static_cast<std::size_t>(i) * in_;
        if (noisy_) {
            const double* srow = sigma_w_.data() + static_cast<std::size_t>(i) * in_;
            const double fo = feps_out_[i];
            for (int j = 0; j < in_; ++j) z += (wrow[j] + srow[j] * fo * feps_in_[j]) * x[j];
        } else {
            for (int j = 0; j < in_; ++j) z += wrow[j] * x[j];
        }
        cached_z_[i] = z;
        y[i] = activate(act_, z);
    }
    have_forward_ = true;
}

void Layer::backward(std::span<const double> dy, std::span<double> dx) {
    if (!have_forward_) throw Error("layer backward without a cached forward");
    if (!dx.empty()) std::fill(dx.begin(), dx.end(), 0.0);
    for (int i = 0; i < out_; ++i) {
        const double dz = dy[i] * activate_grad(act_, cached_z_[i]);
        if (dz == 0.0) continue;
        double* gw = g_mu_w_.data() + static_cast<std::size_t>(i) * in_;
        for (int j = 0; j < in_; ++j) gw[j] += dz * cached_x_[j];
        g_mu_b_[i] += dz;
        if (noisy_) {
            const double fo = feps_out_[i];
            double* gs = g_sigma_w_.data() + static_cast<std::size_t>(i) * in_;
            for (int j = 0; j < in_; ++j) gs[j] += dz * cached_x_[j] * fo * feps_in_[j];
            g_sigma_b_[i] += dz * fo;
        }
        if (!dx.empty()) {
            const double* wrow = mu_w_.data() + static_cast<std::size_t>(i) * in_;
            if (noisy_) {
                const double* srow = sigma_w_.data() + static_cast<std::size_t>(i) * in_;
                const double fo = feps_out_[i];
                for (int j = 0; j < in_; ++j)
                    dx[j] += (wrow[j] + srow[j] * fo * feps_in_[j]) * dz;
            } else {
                for (int j = 0; j < in_; ++j) dx[j] += wrow[j] * dz;
            }
        }
    }
}

void Layer::zero_grad() {
    std::fill(g_mu_w_.begin(), g_mu_w_.end(), 0.0);
    std::fill(g_mu_b_.begin(), g_mu_b_.end(), 0.0);
    std::fill(g_sigma_w_.begin(), g_sigma_w_.end(), 0.0);
    std::fill(g_sigma_b_.begin(), g_sigma_b_.end(), 0.0);
}

void Layer::sample_noise(Rng& rng) {
    if (!noisy_) return;
    for (auto& e : feps_in_) e = noise_transform(rng.gaussian());
    for (auto& e : feps_out_) e = noise_transform(rng.gaussian());
}

void Layer::clear_noise() {
    std::fill(feps_in_.begin(), feps_in_.end(), 0.0);
    std::fill(feps_out_.begin(), feps_out_.end(), 0.0);
}

Network::Network(NetworkConfig cfg, std::uint64_t init_seed) : cfg_(std::move(cfg)) {
    if (cfg_.input_size < 1 || cfg_.actions < 1 || cfg_.atoms < 1)
        throw Error("network config: sizes must be positive");
    Rng init(init_seed);

    int prev = cfg_.input_size;
    for (int width : cfg_.hidden) {
        encoder_.emplace_back(prev, width, Activation::Relu, cfg_.noisy, cfg_.sigma0, init);
        prev = width;
    }
    head_storage_.reserve(2);
    if (cfg_.dueling) {
        head_storage_.emplace_back(prev, cfg_.atoms, Activation::Identity, cfg_.noisy, cfg_.sigma0,
                                   init);
        head_storage_.emplace_back(prev, cfg_.actions * cfg_.atoms, Activation::Identity,
                                   cfg_.noisy, cfg_.sigma0, init);
        value_head_ = &head_storage_[0];
        adv_head_ = &head_storage_[1];
        value_out_.resize(cfg_.atoms);
        adv_out_.resize(static_cast<std::size_t>(cfg_.actions) * cfg_.atoms);
        dvalue_.resize(cfg_.atoms);
        dadv_.resize(adv_out_.size());
    } else {
        head_storage_.emplace_back(prev, cfg_.actions * cfg_.atoms, Activation::Identity,
                                   cfg_.noisy, cfg_.sigma0, init);
        head_ = &head_storage_[0];
    }

    acts_.resize(encoder_.size());
    dacts_.resize(encoder_.size());
    for (std::size_t i = 0; i < encoder_.size(); ++i) {
        acts_[i].resize(encoder_[i].out_size());
        dacts_[i].resize(encoder_[i].out_size());
    }
    output_.resize(static_cast<std::size_t>(cfg_.actions) * cfg_.atoms);
    input_grad_.resize(cfg_.input_size);
}

std::span<const double> Network::forward(std::span<const double> input) {
    if (static_cast<int>(input.size()) != cfg_.input_size)
        throw Error("network forward: input size mismatch");
    std::span<const double> x = input;
    for (std::size_t i = 0; i < encoder_.size(); ++i) {
        encoder_[i].forward(x, acts_[i]);
        x = acts_[i];
    }
    if (cfg_.dueling) {
        value_head_->forward(x, value_out_);
        adv_head_->forward(x, adv_out_);
        dueling_combine(value_out_, adv_out_, cfg_.actions, cfg_.atoms, output_);
    } else {
        head_->forward(x, output_);
    }
    have_forward_ = true;
    return output_;
}

std::span<const double> Network::backward(std::span<const double> doutput) {
    if (!have_forward_) throw Error("network backward without a preceding forward");
    if (doutput.size() != output_.size())
        throw Error("network backward: output gradient size mismatch");

    std::span<double> dx_enc = encoder_.empty() ? std::span<double>(input_grad_)
                                                : std::span<double>(dacts_.back());
    if (cfg_.dueling) {
        dueling_combine_backward(doutput, cfg_.actions, cfg_.atoms, dvalue_, dadv_);
        std::vector<double> tmp(dx_enc.size());
        value_head_->backward(dvalue_, dx_enc);
        adv_head_->backward(dadv_, tmp);
        for (std::size_t i = 0; i < dx_enc.size(); ++i) dx_enc[i] += tmp[i];
    } else {
        head_->backward(doutput, dx_enc);
    }
    for (std::size_t i = encoder_.size(); i-- > 0;) {
        std::span<double> dprev = (i == 0) ? std::span<double>(input_grad_)
                                           : std::span<double>(dacts_[i - 1]);
        encoder_[i].backward(dacts_[i], dprev);
    }
    return input_grad_;
}

void Network::zero_grad() {
    for (auto& l : encoder_) l.zero_grad();
    for (auto& l : head_storage_) l.zero_grad();
}

void Network::sample_noise(Rng& rng) {
    for (auto& l : encoder_) l.sample_noise(rng);
    for (auto& l : head_storage_) l.sample_noise(rng);
}

void Network::clear_noise() {
    for (auto& l : encoder_) l.clear_noise();
    for (auto& l : head_storage_) l.clear_noise();
}

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (const auto& l : encoder_) n += l.param_count();
    for (const auto& l : head_storage_) n += l.param_count();
    return n;
}

std::vector<double> Network::flatten_params() {
    std::vector<double> flat;
    flat.reserve(param_count());
    visit_params([&](double& p) { flat.push_back(p); });
    return flat;
}

void Network::unflatten_params(std::span<const double> flat) {
    if (flat.size() != param_count()) throw Error("unflatten: parameter count mismatch");
    std::size_t i = 0;
    visit_params([&](double& p) { p = flat[i++]; });
}

void Network::copy_params_from(Network& other) {
    if (!(cfg_ == other.cfg_)) throw Error("parameter copy between mismatched architectures");
    std::vector<double> flat = other.flatten_params();
    unflatten_params(flat);
}

void Network::soft_update_from(Network& other, double tau) {
    if (!(cfg_ == other.cfg_)) throw Error("soft update between mismatched architectures");
    std::vector<double> flat = other.flatten_params();
    std::size_t i = 0;
    visit_params([&](double& p) { p = (1.0 - tau) * p + tau * flat[i++]; });
}

}  // namespace gridrl::nn
