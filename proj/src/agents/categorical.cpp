#include "gridrl/agents/categorical.hpp"

#include <algorithm>
#include <cmath>

namespace gridrl::agents {

std::vector<double> atom_support(double v_min, double v_max, int atoms) {
    if (atoms < 2 || !(v_min < v_max)) throw Error("atom support: need atoms >= 2, v_min < v_max");
    std::vector<double> z(atoms);
    const double dz = (v_max - v_min) / (atoms - 1);
    for (int i = 0; i < atoms; ++i) z[i] = v_min + i * dz;
    return z;
}

void categorical_projection(std::span<const double> target_probs, double reward, double discount,
                            std::span<const double> support, std::span<double> out) {
    const int n = static_cast<int>(support.size());
    const double v_min = support.front();
    const double v_max = support.back();
    const double dz = (v_max - v_min) / (n - 1);

    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < n; ++j) {
        const double mass = target_probs[j];
        if (mass == 0.0) continue;
        const double tz = std::clamp(reward + discount * support[j], v_min, v_max);
        const double b = (tz - v_min) / dz;
        const int lo = static_cast<int>(std::floor(b));
        const int hi = static_cast<int>(std::ceil(b));
        if (lo == hi) {
            out[lo] += mass;  // atom-aligned: keep the mass whole
        } else {
            out[lo] += mass * (hi - b);
            out[hi] += mass * (b - lo);
        }
    }
}

double kl_divergence(std::span<const double> projected, std::span<const double> predicted) {
    double kl = 0.0;
    for (std::size_t i = 0; i < projected.size(); ++i) {
        const double m = projected[i];
        if (m <= 0.0) continue;
        kl += m * (std::log(m) - std::log(predicted[i]));
    }
    return std::max(kl, 0.0);
}

double expected_value(std::span<const double> probs, std::span<const double> support) {
    double ev = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) ev += probs[i] * support[i];
    return ev;
}

}  // namespace gridrl::agents
