#include "gridrl/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gridrl::nn {

double gradient_check(Network& net, const LossFn& loss, std::span<const double> input,
                      double epsilon) {
    const std::size_t n = net.param_count();
    std::vector<double> grad_buf(net.config().output_size());

    // analytic pass
    net.zero_grad();
    auto out = net.forward(input);
    loss(out, grad_buf);
    net.backward(grad_buf);
    std::vector<double> analytic;
    analytic.reserve(n);
    net.visit_params_grads([&](double&, double& g) { analytic.push_back(g); });

    // collect addresses once; visit order is stable
    std::vector<double*> params;
    params.reserve(n);
    net.visit_params([&](double& p) { params.push_back(&p); });

    auto eval = [&]() {
        auto o = net.forward(input);
        return loss(o, grad_buf);
    };

    double max_rel = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double saved = *params[i];
        *params[i] = saved + epsilon;
        const double lp = eval();
        *params[i] = saved - epsilon;
        const double lm = eval();
        *params[i] = saved;
        const double numeric = (lp - lm) / (2.0 * epsilon);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
        max_rel = std::max(max_rel, std::abs(analytic[i] - numeric) / denom);
    }
    return max_rel;
}

}  // namespace gridrl::nn
