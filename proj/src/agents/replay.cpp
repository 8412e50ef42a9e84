#include "gridrl/agents/replay.hpp"

#include <algorithm>
#include <cmath>

namespace gridrl::agents {

void UniformReplay::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[write_] = std::move(t);
    }
    write_ = (write_ + 1) % capacity_;
}

std::vector<std::size_t> UniformReplay::sample_indices(std::size_t batch, Rng& rng) const {
    if (items_.size() < batch) throw Error("replay: buffer smaller than batch");
    std::vector<std::size_t> out(batch);
    for (auto& i : out) i = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(items_.size())));
    return out;
}

SumTree::SumTree(std::size_t capacity) : capacity_(capacity) {
    leaf_base_ = 1;
    while (leaf_base_ < capacity_) leaf_base_ *= 2;
    tree_.assign(2 * leaf_base_, 0.0);
}

void SumTree::update(std::size_t leaf, double value) {
    std::size_t i = leaf_base_ + leaf;
    tree_[i] = value;
    for (i /= 2; i >= 1; i /= 2) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

std::size_t SumTree::sample(double u) const {
    std::size_t i = 1;
    while (i < leaf_base_) {
        const std::size_t left = 2 * i;
        if (u < tree_[left]) {
            i = left;
        } else {
            u -= tree_[left];
            i = left + 1;
        }
    }
    return std::min(i - leaf_base_, capacity_ - 1);
}

std::size_t linear_proportional_sample(std::span<const double> mass, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        cum += mass[i];
        if (u < cum) return i;
    }
    return mass.size() - 1;
}

PrioritizedReplay::PrioritizedReplay(std::size_t capacity, double alpha, double beta,
                                     double offset)
    : capacity_(capacity), alpha_(alpha), beta_(beta), offset_(offset), tree_(capacity) {
    if (offset_ <= 0.0) throw Error("prioritized replay: offset must be positive");
}

void PrioritizedReplay::set_priority(std::size_t i, double p) {
    const bool displaced_max = i < priorities_.size() && priorities_[i] == max_priority_ &&
                               p < max_priority_;
    if (i < priorities_.size()) {
        priorities_[i] = p;
    } else {
        priorities_.push_back(p);
    }
    tree_.update(i, std::pow(p, alpha_));
    if (p > max_priority_) {
        max_priority_ = p;
    } else if (displaced_max) {
        max_priority_ = *std::max_element(priorities_.begin(), priorities_.end());
    }
}

void PrioritizedReplay::push(Transition t) {
    const double p = items_.empty() ? 1.0 : max_priority_;
    std::size_t slot;
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        slot = items_.size() - 1;
    } else {
        slot = write_;
        items_[slot] = std::move(t);
    }
    write_ = (write_ + 1) % capacity_;
    set_priority(slot, p);
}

PrioritizedSample PrioritizedReplay::sample(std::size_t batch, Rng& rng) {
    if (items_.size() < batch) throw Error("prioritized replay: buffer smaller than batch");
    PrioritizedSample out;
    out.indices.resize(batch);
    out.weights.resize(batch);

    const double total = tree_.total();
    const double n = static_cast<double>(items_.size());
    double max_w = 0.0;
    for (std::size_t k = 0; k < batch; ++k) {
        const std::size_t i = tree_.sample(rng.uniform() * total);
        out.indices[k] = i;
        const double prob = tree_.get(i) / total;
        out.weights[k] = std::pow(n * prob, -beta_);
        max_w = std::max(max_w, out.weights[k]);
    }
    for (auto& w : out.weights) w /= max_w;
    return out;
}

void PrioritizedReplay::update_priorities(std::span<const std::size_t> indices,
                                          std::span<const double> errors) {
    if (indices.size() != errors.size()) throw Error("prioritized replay: size mismatch");
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= items_.size()) throw Error("prioritized replay: index out of range");
        set_priority(indices[k], std::abs(errors[k]) + offset_);
    }
}

}  // namespace gridrl::agents
