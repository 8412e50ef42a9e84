#pragma once

#include <functional>
#include <span>

#include "gridrl/nn/network.hpp"

namespace gridrl::nn {

/// Loss over a network output. `grad` must be filled with dL/d(output).
using LossFn =
    std::function<double(std::span<const double> output, std::span<double> grad)>;

/// Compares analytic gradients against central finite differences over every
/// parameter. Intended for small nets (<= a few thousand parameters). Noise
/// is held fixed throughout, so noisy layers are checked too.
/// Returns the maximum relative error, with |a - n| / max(|a|, |n|, 1e-6).
double gradient_check(Network& net, const LossFn& loss, std::span<const double> input,
                      double epsilon = 1e-5);

}  // namespace gridrl::nn
