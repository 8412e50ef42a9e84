#pragma once

#include <span>
#include <vector>

#include "gridrl/env/microgrid.hpp"
#include "gridrl/errors.hpp"

namespace gridrl::baselines {

/// Constants of the simplified arbitrage model: constant ESS efficiency and
/// a single combined transformer+inverter efficiency.
struct LpConfig {
    double eta_ess = 0.95;
    double eta_grid = 0.92;
    double eta_sdc = 0.999;
    double x_max = 2.0;
    double c_max = 5.0;
    double c0 = 0.0;
};

/// max sum_t P_t (x_dis_t * eta_grid * eta_ess - x_ch_t / eta_grid)
/// s.t.  0 <= x_ch_t, x_dis_t <= X_max,  0 <= c_t <= C_max,
///       c_t = c_{t-1} * eta_sdc + x_ch_t * eta_ess - x_dis_t,  c_{-1} = c0.
struct LpProblem {
    int horizon = 0;
    std::vector<double> prices;  // predicted price per step
    LpConfig cfg;
};

LpProblem build_lp(std::span<const double> prices, const LpConfig& cfg);

struct LpSolution {
    std::vector<double> x_ch, x_dis, charge;
    std::vector<double> schedule;  // net power x_ch - x_dis per hour
    double objective = 0.0;
    int iterations = 0;
};

/// Exact optimum via a bounded-variable revised simplex (Bland's rule).
/// Throws SolverError on numerical failure; never returns silently
/// suboptimal or infeasible output.
LpSolution solve_lp(const LpProblem& problem);

/// Largest violation of the constraints and bounds; should be <= 1e-9 for
/// any returned solution.
double feasibility_error(const LpProblem& problem, std::span<const double> x_ch,
                         std::span<const double> x_dis, std::span<const double> charge);

/// Objective of a given split schedule replayed through the simplified
/// dynamics; infeasible schedules throw.
double evaluate_schedule(const LpProblem& problem, std::span<const double> x_ch,
                         std::span<const double> x_dis);

struct BruteForceResult {
    std::vector<double> schedule;  // net power per hour
    double objective = 0.0;
};

/// Exhaustive search over a discrete action grid under the same simplified
/// dynamics. Skips infeasible schedules. Oracle for small instances;
/// throws once |grid|^T exceeds 10^6 combinations.
BruteForceResult brute_force_schedule(std::span<const double> prices,
                                      std::span<const double> action_grid, const LpConfig& cfg);

struct ReplayResult {
    double savings_gbp = 0.0;
    double reward_sum = 0.0;
    int punish_count = 0;
};

/// Replays a fixed net-power sequence through the full nonlinear environment
/// from its current position, accumulating unnormalized savings.
ReplayResult replay_schedule(env::Microgrid& grid_env, std::span<const double> x_mw);

}  // namespace gridrl::baselines
