#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridrl/errors.hpp"
#include "gridrl/rng.hpp"

namespace gridrl::agents {

/// One replay element. For n-step agents `reward` holds the accumulated
/// discounted return and `next_state` the bootstrap state n steps ahead.
struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
};

/// Ring buffer with uniform sampling (independent draws).
class UniformReplay {
public:
    explicit UniformReplay(std::size_t capacity) : capacity_(capacity) {}

    void push(Transition t);
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

    const Transition& at(std::size_t i) const { return items_[i]; }
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::size_t write_ = 0;
    std::vector<Transition> items_;
};

/// Flat-array segment tree over priorities for O(log N) proportional
/// sampling. Leaves live at [leaf_base, leaf_base + capacity).
class SumTree {
public:
    explicit SumTree(std::size_t capacity);

    void update(std::size_t leaf, double value);
    double get(std::size_t leaf) const { return tree_[leaf_base_ + leaf]; }
    double total() const { return tree_[1]; }

    /// Descends with a uniform draw u in [0, total()). Equivalent to a
    /// linear cumulative scan over the leaves.
    std::size_t sample(double u) const;

    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::size_t leaf_base_;
    std::vector<double> tree_;
};

/// Reference proportional sampler: linear scan over the cumulative mass.
/// Kept alongside the tree as an oracle for cross-checks.
std::size_t linear_proportional_sample(std::span<const double> mass, double u);

struct PrioritizedSample {
    std::vector<std::size_t> indices;
    std::vector<double> weights;  // importance weights, max-normalized to 1
};

/// Proportional prioritized replay (sum-tree backed).
/// Raw priorities p are stored as given; the tree holds p^alpha so that
/// P(i) = p_i^alpha / sum_k p_k^alpha. New items enter at the maximum raw
/// priority currently stored (1 for the first insertion).
class PrioritizedReplay {
public:
    PrioritizedReplay(std::size_t capacity, double alpha, double beta, double offset);

    void push(Transition t);
    PrioritizedSample sample(std::size_t batch, Rng& rng);

    /// p_i = |error_i| + offset.
    void update_priorities(std::span<const std::size_t> indices, std::span<const double> errors);

    const Transition& at(std::size_t i) const { return items_[i]; }
    std::size_t size() const { return items_.size(); }
    double priority(std::size_t i) const { return priorities_[i]; }
    double max_priority() const { return max_priority_; }
    double beta() const { return beta_; }
    void set_beta(double beta) { beta_ = beta; }

    /// Sampling probability of one stored item, P(i); exposed for tests.
    double probability(std::size_t i) const { return tree_.get(i) / tree_.total(); }

private:
    void set_priority(std::size_t i, double p);

    std::size_t capacity_;
    double alpha_, beta_, offset_;
    std::size_t write_ = 0;
    std::vector<Transition> items_;
    std::vector<double> priorities_;
    SumTree tree_;
    double max_priority_ = 1.0;
};

}  // namespace gridrl::agents
