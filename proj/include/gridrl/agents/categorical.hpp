#pragma once

#include <span>
#include <vector>

#include "gridrl/errors.hpp"

namespace gridrl::agents {

/// Equally spaced return supports z_i on [v_min, v_max].
std::vector<double> atom_support(double v_min, double v_max, int atoms);

/// Projects a target distribution through the distributional Bellman update:
/// every atom's mass moves to clamp(reward + discount * z_j, v_min, v_max)
/// and is split linearly between the two neighbouring supports. Mass is
/// conserved exactly; atom-aligned targets keep their mass whole.
void categorical_projection(std::span<const double> target_probs, double reward, double discount,
                            std::span<const double> support, std::span<double> out);

/// KL(m || d) = sum_i m_i (ln m_i - ln d_i), with 0 ln 0 = 0.
/// `predicted` must be strictly positive (softmax output).
double kl_divergence(std::span<const double> projected, std::span<const double> predicted);

/// Expectation of a categorical distribution over its supports.
double expected_value(std::span<const double> probs, std::span<const double> support);

}  // namespace gridrl::agents
