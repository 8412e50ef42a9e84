#include "gridrl/baselines/lp.hpp"

#include <algorithm>
#include <cmath>

namespace gridrl::baselines {

namespace {

constexpr double kTol = 1e-9;
constexpr double kPivotTol = 1e-10;

/// Sparse column with at most two entries. The LP's structure (battery flow
/// variables touch one balance row, charge variables couple neighbouring
/// rows) keeps every basis a forest of row-paths, so basis systems solve in
/// linear time by peeling.
struct Column {
    int row1 = -1;
    double val1 = 0.0;
    int row2 = -1;  // -1 when absent
    double val2 = 0.0;
};

enum class VarStatus { AtLower, AtUpper, Basic };

struct Tableau {
    int n = 0, m = 0;
    std::vector<Column> cols;
    std::vector<double> lower, upper, cost, b;
};

Tableau make_tableau(const LpProblem& p) {
    const int T = p.horizon;
    Tableau t;
    t.n = 3 * T;
    t.m = T;
    t.cols.resize(t.n);
    t.lower.assign(t.n, 0.0);
    t.upper.resize(t.n);
    t.cost.assign(t.n, 0.0);
    t.b.assign(t.m, 0.0);

    const auto& c = p.cfg;
    for (int i = 0; i < T; ++i) {
        // x_ch[i]
        t.cols[i] = {i, -c.eta_ess, -1, 0.0};
        t.upper[i] = c.x_max;
        t.cost[i] = -p.prices[i] / c.eta_grid;
        // x_dis[i]
        t.cols[T + i] = {i, 1.0, -1, 0.0};
        t.upper[T + i] = c.x_max;
        t.cost[T + i] = p.prices[i] * c.eta_grid * c.eta_ess;
        // c[i]
        t.cols[2 * T + i] = {i, 1.0, (i + 1 < T) ? i + 1 : -1, -c.eta_sdc};
        t.upper[2 * T + i] = c.c_max;
    }
    t.b[0] = c.eta_sdc * c.c0;
    return t;
}

/// B w = rhs by peeling degree-1 rows of the basis forest.
void solve_basis(const Tableau& t, const std::vector<int>& basic, std::vector<double>& rhs,
                 std::vector<double>& w) {
    const int m = t.m;
    w.assign(m, 0.0);

    // incidence of basic columns on rows
    static thread_local std::vector<std::vector<int>> row_cols;
    static thread_local std::vector<int> deg;
    row_cols.assign(m, {});
    deg.assign(m, 0);
    for (int p = 0; p < m; ++p) {
        const Column& col = t.cols[basic[p]];
        row_cols[col.row1].push_back(p);
        ++deg[col.row1];
        if (col.row2 >= 0) {
            row_cols[col.row2].push_back(p);
            ++deg[col.row2];
        }
    }

    static thread_local std::vector<char> col_done, row_done;
    col_done.assign(m, 0);
    row_done.assign(m, 0);
    static thread_local std::vector<int> queue;
    queue.clear();
    for (int r = 0; r < m; ++r)
        if (deg[r] == 1) queue.push_back(r);

    int solved = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int r = queue[qi];
        if (row_done[r] || deg[r] != 1) continue;
        int pos = -1;
        for (int p : row_cols[r])
            if (!col_done[p]) pos = p;
        if (pos < 0) continue;
        const Column& col = t.cols[basic[pos]];
        const double coeff = (col.row1 == r) ? col.val1 : col.val2;
        if (std::abs(coeff) < kPivotTol) throw SolverError("singular basis (tiny pivot)");
        w[pos] = rhs[r] / coeff;
        col_done[pos] = 1;
        row_done[r] = 1;
        ++solved;
        const int other = (col.row1 == r) ? col.row2 : col.row1;
        if (other >= 0 && !row_done[other]) {
            const double oc = (col.row1 == other) ? col.val1 : col.val2;
            rhs[other] -= oc * w[pos];
            if (--deg[other] == 1) queue.push_back(other);
        }
    }
    if (solved != m) throw SolverError("singular basis (peeling stalled)");
}

/// B^T y = c_B: roots are rows held by single-entry basic columns; the rest
/// propagates along the row-path edges.
void solve_basis_transpose(const Tableau& t, const std::vector<int>& basic,
                           const std::vector<double>& cb, std::vector<double>& y) {
    const int m = t.m;
    y.assign(m, 0.0);

    static thread_local std::vector<std::vector<int>> row_edges;  // two-entry columns per row
    row_edges.assign(m, {});
    static thread_local std::vector<char> row_done;
    row_done.assign(m, 0);
    static thread_local std::vector<int> queue;
    queue.clear();

    for (int p = 0; p < m; ++p) {
        const Column& col = t.cols[basic[p]];
        if (col.row2 < 0) {
            if (row_done[col.row1]) throw SolverError("singular basis (duplicate root)");
            y[col.row1] = cb[p] / col.val1;
            row_done[col.row1] = 1;
            queue.push_back(col.row1);
        } else {
            row_edges[col.row1].push_back(p);
            row_edges[col.row2].push_back(p);
        }
    }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const int r = queue[qi];
        for (int p : row_edges[r]) {
            const Column& col = t.cols[basic[p]];
            const int other = (col.row1 == r) ? col.row2 : col.row1;
            if (row_done[other]) continue;
            const double coeff_r = (col.row1 == r) ? col.val1 : col.val2;
            const double coeff_o = (col.row1 == r) ? col.val2 : col.val1;
            if (std::abs(coeff_o) < kPivotTol) throw SolverError("singular basis (tiny pivot)");
            y[other] = (cb[p] - coeff_r * y[r]) / coeff_o;
            row_done[other] = 1;
            queue.push_back(other);
        }
    }
    for (int r = 0; r < m; ++r)
        if (!row_done[r]) throw SolverError("singular basis (transpose stalled)");
}

double dot_column(const Column& col, const std::vector<double>& y) {
    double v = col.val1 * y[col.row1];
    if (col.row2 >= 0) v += col.val2 * y[col.row2];
    return v;
}

}  // namespace

LpProblem build_lp(std::span<const double> prices, const LpConfig& cfg) {
    if (prices.empty()) throw ContractViolation("build_lp: need at least one step");
    if (cfg.c0 < 0.0 || cfg.c0 > cfg.c_max)
        throw ContractViolation("build_lp: initial charge outside [0, C_max]");
    LpProblem p;
    p.horizon = static_cast<int>(prices.size());
    p.prices.assign(prices.begin(), prices.end());
    p.cfg = cfg;
    return p;
}

LpSolution solve_lp(const LpProblem& problem) {
    const Tableau t = make_tableau(problem);
    const int T = problem.horizon;
    const int n = t.n, m = t.m;

    std::vector<VarStatus> status(n, VarStatus::AtLower);
    std::vector<int> basic(m);
    for (int i = 0; i < m; ++i) {
        basic[i] = 2 * T + i;  // charge variables form the startup basis
        status[2 * T + i] = VarStatus::Basic;
    }

    std::vector<double> xb, y, w, rhs, cb(m);
    auto nonbasic_value = [&](int j) {
        return status[j] == VarStatus::AtUpper ? t.upper[j] : t.lower[j];
    };
    auto compute_xb = [&]() {
        rhs = t.b;
        for (int j = 0; j < n; ++j) {
            if (status[j] == VarStatus::Basic) continue;
            const double v = nonbasic_value(j);
            if (v == 0.0) continue;
            const Column& col = t.cols[j];
            rhs[col.row1] -= col.val1 * v;
            if (col.row2 >= 0) rhs[col.row2] -= col.val2 * v;
        }
        solve_basis(t, basic, rhs, xb);
    };

    const long max_iters = 2000L + 200L * (n + m);
    int iters = 0;
    compute_xb();

    for (;; ++iters) {
        if (iters > max_iters) throw SolverError("simplex iteration limit exceeded");

        for (int i = 0; i < m; ++i) cb[i] = t.cost[basic[i]];
        solve_basis_transpose(t, basic, cb, y);

        // entering variable, Bland's rule: lowest improving index
        int enter = -1;
        double sigma = 1.0;
        for (int j = 0; j < n; ++j) {
            if (status[j] == VarStatus::Basic) continue;
            const double d = t.cost[j] - dot_column(t.cols[j], y);
            if (status[j] == VarStatus::AtLower && d > kTol) {
                enter = j;
                sigma = 1.0;
                break;
            }
            if (status[j] == VarStatus::AtUpper && d < -kTol) {
                enter = j;
                sigma = -1.0;
                break;
            }
        }
        if (enter < 0) break;  // optimal

        rhs.assign(m, 0.0);
        const Column& ecol = t.cols[enter];
        rhs[ecol.row1] = ecol.val1;
        if (ecol.row2 >= 0) rhs[ecol.row2] = ecol.val2;
        solve_basis(t, basic, rhs, w);

        // ratio test: entering moves by step >= 0 in direction sigma
        double step = t.upper[enter] - t.lower[enter];
        int leave_pos = -1;
        bool leave_to_upper = false;
        for (int i = 0; i < m; ++i) {
            const double delta = -sigma * w[i];  // d(x_B[i]) / d(step)
            if (delta < -kPivotTol) {
                const double room = xb[i] - t.lower[basic[i]];
                const double limit = room / (-delta);
                if (limit < step - kPivotTol ||
                    (limit < step + kPivotTol && leave_pos >= 0 &&
                     basic[i] < basic[leave_pos])) {
                    step = std::max(limit, 0.0);
                    leave_pos = i;
                    leave_to_upper = false;
                }
            } else if (delta > kPivotTol) {
                const double room = t.upper[basic[i]] - xb[i];
                const double limit = room / delta;
                if (limit < step - kPivotTol ||
                    (limit < step + kPivotTol && leave_pos >= 0 &&
                     basic[i] < basic[leave_pos])) {
                    step = std::max(limit, 0.0);
                    leave_pos = i;
                    leave_to_upper = true;
                }
            }
        }

        if (leave_pos < 0) {
            // bound-to-bound flip of the entering variable
            status[enter] =
                status[enter] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
        } else {
            const int leave_var = basic[leave_pos];
            status[leave_var] = leave_to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
            basic[leave_pos] = enter;
            status[enter] = VarStatus::Basic;
        }
        compute_xb();
    }

    // assemble the solution
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j)
        if (status[j] != VarStatus::Basic) x[j] = nonbasic_value(j);
    for (int i = 0; i < m; ++i) x[basic[i]] = xb[i];

    LpSolution sol;
    sol.iterations = iters;
    sol.x_ch.assign(x.begin(), x.begin() + T);
    sol.x_dis.assign(x.begin() + T, x.begin() + 2 * T);
    sol.charge.assign(x.begin() + 2 * T, x.begin() + 3 * T);
    sol.schedule.resize(T);
    for (int i = 0; i < T; ++i) sol.schedule[i] = sol.x_ch[i] - sol.x_dis[i];
    sol.objective = 0.0;
    for (int j = 0; j < n; ++j) sol.objective += t.cost[j] * x[j];

    const double err = feasibility_error(problem, sol.x_ch, sol.x_dis, sol.charge);
    if (err > 1e-9) {
        throw SolverError("simplex returned an infeasible point, violation " +
                          std::to_string(err));
    }
    return sol;
}

double feasibility_error(const LpProblem& problem, std::span<const double> x_ch,
                         std::span<const double> x_dis, std::span<const double> charge) {
    const auto& c = problem.cfg;
    double worst = 0.0;
    double prev = c.c0;
    for (int i = 0; i < problem.horizon; ++i) {
        worst = std::max(worst, -x_ch[i]);
        worst = std::max(worst, x_ch[i] - c.x_max);
        worst = std::max(worst, -x_dis[i]);
        worst = std::max(worst, x_dis[i] - c.x_max);
        worst = std::max(worst, -charge[i]);
        worst = std::max(worst, charge[i] - c.c_max);
        const double expect = prev * c.eta_sdc + x_ch[i] * c.eta_ess - x_dis[i];
        worst = std::max(worst, std::abs(charge[i] - expect));
        prev = charge[i];
    }
    return worst;
}

double evaluate_schedule(const LpProblem& problem, std::span<const double> x_ch,
                         std::span<const double> x_dis) {
    if (static_cast<int>(x_ch.size()) != problem.horizon ||
        static_cast<int>(x_dis.size()) != problem.horizon)
        throw ContractViolation("evaluate_schedule: length mismatch");
    const auto& c = problem.cfg;
    double charge = c.c0;
    double objective = 0.0;
    for (int i = 0; i < problem.horizon; ++i) {
        charge = charge * c.eta_sdc + x_ch[i] * c.eta_ess - x_dis[i];
        if (charge < -kTol || charge > c.c_max + kTol)
            throw ContractViolation("evaluate_schedule: infeasible at step " + std::to_string(i));
        objective += problem.prices[i] * (x_dis[i] * c.eta_grid * c.eta_ess - x_ch[i] / c.eta_grid);
    }
    return objective;
}

BruteForceResult brute_force_schedule(std::span<const double> prices,
                                      std::span<const double> action_grid, const LpConfig& cfg) {
    const int T = static_cast<int>(prices.size());
    const int g = static_cast<int>(action_grid.size());
    if (T < 1 || g < 1) throw ContractViolation("brute force: empty instance");
    double combos = 1.0;
    for (int i = 0; i < T; ++i) {
        combos *= g;
        if (combos > 1e6) throw ContractViolation("brute force: more than 1e6 combinations");
    }

    std::vector<int> odo(T, 0);
    BruteForceResult best;
    best.objective = 0.0;
    best.schedule.assign(T, 0.0);  // all-idle is always feasible
    bool found = false;

    for (;;) {
        double charge = cfg.c0;
        double objective = 0.0;
        bool feasible = true;
        for (int i = 0; i < T && feasible; ++i) {
            const double x = action_grid[odo[i]];
            const double x_ch = std::max(x, 0.0);
            const double x_dis = std::max(-x, 0.0);
            if (x_ch > cfg.x_max + kTol || x_dis > cfg.x_max + kTol) {
                feasible = false;
                break;
            }
            charge = charge * cfg.eta_sdc + x_ch * cfg.eta_ess - x_dis;
            if (charge < -kTol || charge > cfg.c_max + kTol) {
                feasible = false;
                break;
            }
            objective += prices[i] * (x_dis * cfg.eta_grid * cfg.eta_ess - x_ch / cfg.eta_grid);
        }
        if (feasible && (!found || objective > best.objective)) {
            found = true;
            best.objective = objective;
            for (int i = 0; i < T; ++i) best.schedule[i] = action_grid[odo[i]];
        }
        int pos = T - 1;
        while (pos >= 0 && ++odo[pos] == g) odo[pos--] = 0;
        if (pos < 0) break;
    }
    return best;
}

ReplayResult replay_schedule(env::Microgrid& grid_env, std::span<const double> x_mw) {
    const std::size_t available = grid_env.series().size() - grid_env.state().index - 1;
    if (x_mw.size() > available)
        throw ContractViolation("replay: schedule longer than the remaining series");
    ReplayResult out;
    for (double x : x_mw) {
        const auto r = grid_env.step_power(x);
        out.savings_gbp += r.info.savings_gbp;
        out.reward_sum += r.reward;
        if (r.info.overflow_mwh > 0.0) ++out.punish_count;
    }
    return out;
}

}  // namespace gridrl::baselines
