#include "gridrl/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "gridrl/nn/serialize.hpp"

namespace gridrl::harness {

namespace fs = std::filesystem;

Algorithm parse_algorithm(const std::string& name) {
    if (name == "dqn") return Algorithm::Dqn;
    if (name == "ddqn") return Algorithm::Ddqn;
    if (name == "d3qn") return Algorithm::D3qn;
    if (name == "per") return Algorithm::PerDqn;
    if (name == "ms") return Algorithm::MsDqn;
    if (name == "nn") return Algorithm::NnDqn;
    if (name == "c51") return Algorithm::C51;
    if (name == "rainbow") return Algorithm::Rainbow;
    if (name == "ddpg") return Algorithm::Ddpg;
    if (name == "lp") return Algorithm::Lp;
    throw Error("unknown algorithm: " + name);
}

Scenario parse_scenario(const std::string& name) {
    if (name == "basic5") return Scenario::Basic5;
    if (name == "basic9") return Scenario::Basic9;
    if (name == "forecast5") return Scenario::Forecast5;
    if (name == "forecast9") return Scenario::Forecast9;
    throw Error("unknown scenario: " + name);
}

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Dqn: return "dqn";
        case Algorithm::Ddqn: return "ddqn";
        case Algorithm::D3qn: return "d3qn";
        case Algorithm::PerDqn: return "per";
        case Algorithm::MsDqn: return "ms";
        case Algorithm::NnDqn: return "nn";
        case Algorithm::C51: return "c51";
        case Algorithm::Rainbow: return "rainbow";
        case Algorithm::Ddpg: return "ddpg";
        default: return "lp";
    }
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Basic5: return "basic5";
        case Scenario::Basic9: return "basic9";
        case Scenario::Forecast5: return "forecast5";
        default: return "forecast9";
    }
}

int scenario_observations(Scenario s) { return scenario_uses_forecasts(s) ? 12 : 8; }

int scenario_actions(Scenario s) {
    return (s == Scenario::Basic5 || s == Scenario::Forecast5) ? 5 : 9;
}

bool scenario_uses_forecasts(Scenario s) {
    return s == Scenario::Forecast5 || s == Scenario::Forecast9;
}

bool algorithm_is_distributional(Algorithm a) {
    return a == Algorithm::C51 || a == Algorithm::Rainbow;
}

namespace {

agents::AgentConfig algorithm_preset(Algorithm a) {
    switch (a) {
        case Algorithm::Ddqn: return agents::AgentConfig::ddqn();
        case Algorithm::D3qn: return agents::AgentConfig::d3qn();
        case Algorithm::PerDqn: return agents::AgentConfig::per_dqn();
        case Algorithm::MsDqn: return agents::AgentConfig::ms_dqn();
        case Algorithm::NnDqn: return agents::AgentConfig::nn_dqn();
        case Algorithm::C51: return agents::AgentConfig::c51();
        case Algorithm::Rainbow: return agents::AgentConfig::rainbow();
        default: return agents::AgentConfig::dqn();
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) out.push_back(std::stoi(token));
    }
    if (out.empty()) throw Error("expected comma-separated integers, got '" + text + "'");
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string join_u64s(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// per-run seed streams not owned by the agents
constexpr std::uint64_t kForecastStreamBase = 31;  // +0 demand, +1 price, +2 pv, +3 wt
constexpr std::uint64_t kDataStream = 41;

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& f) {
    ExperimentConfig c;
    c.algorithm = parse_algorithm(f.get_string("run", "algorithm", "dqn"));
    c.scenario = parse_scenario(f.get_string("run", "scenario", "basic5"));
    if (f.has("run", "seeds")) c.seeds = parse_u64_list(*f.get("run", "seeds"));
    c.out_dir = f.get_string("run", "out_dir", c.out_dir);
    c.run_name = f.get_string("run", "name", c.run_name);
    c.train_episodes = f.get_int("run", "train_episodes", c.train_episodes);
    c.eval_episodes = f.get_int("run", "eval_episodes", c.eval_episodes);
    c.snapshot_period = f.get_int("run", "snapshot_period", c.snapshot_period);

    c.data_csv = f.get_string("data", "csv", "");
    c.holidays_path = f.get_string("data", "holidays", "");

    auto& s = c.synth;
    s.weeks = f.get_int("synthetic", "weeks", s.weeks);
    s.seed = f.get_u64("synthetic", "seed", 0);  // 0 = derive from the run seed
    s.demand_base = f.get_double("synthetic", "demand_base", s.demand_base);
    s.demand_daily_amp = f.get_double("synthetic", "demand_daily_amp", s.demand_daily_amp);
    s.demand_weekend_dip = f.get_double("synthetic", "demand_weekend_dip", s.demand_weekend_dip);
    s.demand_noise = f.get_double("synthetic", "demand_noise", s.demand_noise);
    s.price_mean = f.get_double("synthetic", "price_mean", s.price_mean);
    s.price_volatility = f.get_double("synthetic", "price_volatility", s.price_volatility);
    s.price_spike_prob = f.get_double("synthetic", "price_spike_prob", s.price_spike_prob);
    s.wind_weibull_shape = f.get_double("synthetic", "wind_shape", s.wind_weibull_shape);
    s.wind_weibull_scale = f.get_double("synthetic", "wind_scale", s.wind_weibull_scale);
    s.solar_seasonal_amp = f.get_double("synthetic", "solar_seasonal_amp", s.solar_seasonal_amp);

    auto& g = c.grid;
    g.c_max_mwh = f.get_double("grid", "c_max_mwh", g.c_max_mwh);
    g.x_max_mw = f.get_double("grid", "x_max_mw", g.x_max_mw);
    g.p_max = f.get_double("grid", "p_max", g.p_max);
    g.pv_capacity_mw = f.get_double("grid", "pv_capacity_mw", g.pv_capacity_mw);
    g.pv_reference_wm2 = f.get_double("grid", "pv_reference_wm2", g.pv_reference_wm2);
    g.wt_count = f.get_int("grid", "wt_count", g.wt_count);
    g.transformer_utility_mw =
        f.get_double("grid", "transformer_utility_mw", g.transformer_utility_mw);
    g.eff.ess_eta0 = f.get_double("grid", "ess_eta0", g.eff.ess_eta0);
    g.eff.ess_k1 = f.get_double("grid", "ess_k1", g.eff.ess_k1);
    g.eff.ess_k2 = f.get_double("grid", "ess_k2", g.eff.ess_k2);
    g.eff.eta_sdc = f.get_double("grid", "eta_sdc", g.eff.eta_sdc);

    c.agent = algorithm_preset(c.algorithm);
    auto& a = c.agent;
    a.gamma = f.get_double("agent", "gamma", a.gamma);
    a.lr = f.get_double("agent", "lr", a.lr);
    a.batch_size = f.get_int("agent", "batch_size", a.batch_size);
    a.eps_start = f.get_double("agent", "eps_start", a.eps_start);
    a.eps_min = f.get_double("agent", "eps_min", a.eps_min);
    a.eps_decay = f.get_double("agent", "eps_decay", a.eps_decay);
    a.per_alpha = f.get_double("agent", "per_alpha", a.per_alpha);
    a.per_beta = f.get_double("agent", "per_beta", a.per_beta);
    a.per_offset = f.get_double("agent", "per_offset", a.per_offset);
    a.per_beta_anneal = f.get_bool("agent", "per_beta_anneal", a.per_beta_anneal);
    a.n_steps = f.get_int("agent", "n_steps", a.n_steps);
    a.sigma0 = f.get_double("agent", "sigma0", a.sigma0);
    a.atoms = f.get_int("agent", "atoms", a.atoms);
    a.v_min = f.get_double("agent", "v_min", a.v_min);
    a.v_max = f.get_double("agent", "v_max", a.v_max);
    a.target_sync_period = f.get_int("agent", "target_sync_period", a.target_sync_period);
    a.replay_capacity =
        static_cast<std::size_t>(f.get_u64("agent", "replay_capacity", a.replay_capacity));
    if (f.has("agent", "hidden")) a.hidden = parse_int_list(*f.get("agent", "hidden"));
    a.grad_clip = f.get_bool("agent", "grad_clip", a.grad_clip);
    a.reward_clip = f.get_bool("agent", "reward_clip", a.reward_clip);

    auto& d = c.ddpg;
    d.gamma = f.get_double("ddpg", "gamma", d.gamma);
    d.actor_lr = f.get_double("ddpg", "actor_lr", d.actor_lr);
    d.critic_lr = f.get_double("ddpg", "critic_lr", d.critic_lr);
    d.tau = f.get_double("ddpg", "tau", d.tau);
    d.noise_std = f.get_double("ddpg", "noise_std", d.noise_std);
    d.batch_size = f.get_int("ddpg", "batch_size", d.batch_size);

    auto& l = c.lp;
    l.eta_ess = f.get_double("lp", "eta_ess", l.eta_ess);
    l.eta_grid = f.get_double("lp", "eta_grid", l.eta_grid);
    l.eta_sdc = f.get_double("lp", "eta_sdc", l.eta_sdc);
    l.x_max = g.x_max_mw;
    l.c_max = g.c_max_mwh;
    c.lp_full_horizon = f.get_bool("lp", "full_horizon", c.lp_full_horizon);

    auto& fc = c.forecaster;
    fc.window = f.get_int("forecast", "window", fc.window);
    fc.hidden = f.get_int("forecast", "hidden", fc.hidden);
    fc.epochs = f.get_int("forecast", "epochs", fc.epochs);
    fc.batch_size = f.get_int("forecast", "batch_size", fc.batch_size);
    fc.lr = f.get_double("forecast", "lr", fc.lr);
    fc.train_weeks = f.get_int("forecast", "train_weeks", fc.train_weeks);
    return c;
}

ConfigFile ExperimentConfig::to_config() const {
    ConfigFile f;
    f.set("run", "algorithm", algorithm_name(algorithm));
    f.set("run", "scenario", scenario_name(scenario));
    f.set("run", "seeds", join_u64s(seeds));
    f.set("run", "out_dir", out_dir);
    if (!run_name.empty()) f.set("run", "name", run_name);
    f.set("run", "train_episodes", std::to_string(train_episodes));
    f.set("run", "eval_episodes", std::to_string(eval_episodes));
    f.set("run", "snapshot_period", std::to_string(snapshot_period));

    if (!data_csv.empty()) f.set("data", "csv", data_csv);
    if (!holidays_path.empty()) f.set("data", "holidays", holidays_path);

    f.set("synthetic", "weeks", std::to_string(synth.weeks));
    f.set("synthetic", "seed", std::to_string(synth.seed));
    f.set("synthetic", "demand_base", fmt(synth.demand_base));
    f.set("synthetic", "demand_daily_amp", fmt(synth.demand_daily_amp));
    f.set("synthetic", "demand_weekend_dip", fmt(synth.demand_weekend_dip));
    f.set("synthetic", "demand_noise", fmt(synth.demand_noise));
    f.set("synthetic", "price_mean", fmt(synth.price_mean));
    f.set("synthetic", "price_volatility", fmt(synth.price_volatility));
    f.set("synthetic", "price_spike_prob", fmt(synth.price_spike_prob));
    f.set("synthetic", "wind_shape", fmt(synth.wind_weibull_shape));
    f.set("synthetic", "wind_scale", fmt(synth.wind_weibull_scale));
    f.set("synthetic", "solar_seasonal_amp", fmt(synth.solar_seasonal_amp));

    f.set("grid", "c_max_mwh", fmt(grid.c_max_mwh));
    f.set("grid", "x_max_mw", fmt(grid.x_max_mw));
    f.set("grid", "p_max", fmt(grid.p_max));
    f.set("grid", "pv_capacity_mw", fmt(grid.pv_capacity_mw));
    f.set("grid", "pv_reference_wm2", fmt(grid.pv_reference_wm2));
    f.set("grid", "wt_count", std::to_string(grid.wt_count));
    f.set("grid", "transformer_utility_mw", fmt(grid.transformer_utility_mw));
    f.set("grid", "ess_eta0", fmt(grid.eff.ess_eta0));
    f.set("grid", "ess_k1", fmt(grid.eff.ess_k1));
    f.set("grid", "ess_k2", fmt(grid.eff.ess_k2));
    f.set("grid", "eta_sdc", fmt(grid.eff.eta_sdc));

    f.set("agent", "gamma", fmt(agent.gamma));
    f.set("agent", "lr", fmt(agent.lr));
    f.set("agent", "batch_size", std::to_string(agent.batch_size));
    f.set("agent", "eps_start", fmt(agent.eps_start));
    f.set("agent", "eps_min", fmt(agent.eps_min));
    f.set("agent", "eps_decay", fmt(agent.eps_decay));
    f.set("agent", "per_alpha", fmt(agent.per_alpha));
    f.set("agent", "per_beta", fmt(agent.per_beta));
    f.set("agent", "per_offset", fmt(agent.per_offset));
    f.set("agent", "per_beta_anneal", agent.per_beta_anneal ? "true" : "false");
    f.set("agent", "n_steps", std::to_string(agent.n_steps));
    f.set("agent", "sigma0", fmt(agent.sigma0));
    f.set("agent", "atoms", std::to_string(agent.atoms));
    f.set("agent", "v_min", fmt(agent.v_min));
    f.set("agent", "v_max", fmt(agent.v_max));
    f.set("agent", "target_sync_period", std::to_string(agent.target_sync_period));
    f.set("agent", "replay_capacity", std::to_string(agent.replay_capacity));
    f.set("agent", "hidden", join_ints(agent.hidden));
    f.set("agent", "grad_clip", agent.grad_clip ? "true" : "false");
    f.set("agent", "reward_clip", agent.reward_clip ? "true" : "false");

    f.set("ddpg", "gamma", fmt(ddpg.gamma));
    f.set("ddpg", "actor_lr", fmt(ddpg.actor_lr));
    f.set("ddpg", "critic_lr", fmt(ddpg.critic_lr));
    f.set("ddpg", "tau", fmt(ddpg.tau));
    f.set("ddpg", "noise_std", fmt(ddpg.noise_std));
    f.set("ddpg", "batch_size", std::to_string(ddpg.batch_size));

    f.set("lp", "eta_ess", fmt(lp.eta_ess));
    f.set("lp", "eta_grid", fmt(lp.eta_grid));
    f.set("lp", "eta_sdc", fmt(lp.eta_sdc));
    f.set("lp", "full_horizon", lp_full_horizon ? "true" : "false");

    f.set("forecast", "window", std::to_string(forecaster.window));
    f.set("forecast", "hidden", std::to_string(forecaster.hidden));
    f.set("forecast", "epochs", std::to_string(forecaster.epochs));
    f.set("forecast", "batch_size", std::to_string(forecaster.batch_size));
    f.set("forecast", "lr", fmt(forecaster.lr));
    f.set("forecast", "train_weeks", std::to_string(forecaster.train_weeks));
    return f;
}

agents::AgentConfig ExperimentConfig::resolved_agent() const {
    const agents::AgentConfig preset = algorithm_preset(algorithm);
    const agents::AgentConfig defaults;
    agents::AgentConfig a = agent;
    a.double_q = preset.double_q;
    a.dueling = preset.dueling;
    a.per = preset.per;
    a.multistep = preset.multistep;
    a.noisy = preset.noisy;
    a.categorical = preset.categorical;
    if (a.n_steps == defaults.n_steps) a.n_steps = preset.n_steps;
    if (a.per_offset == defaults.per_offset) a.per_offset = preset.per_offset;
    return a;
}

double RunResult::eval_savings_gbp() const {
    double sum = 0.0;
    for (const auto& e : episodes)
        if (e.evaluation) sum += e.savings_gbp;
    return sum;
}

data::TimeSeries load_series(const ExperimentConfig& cfg) {
    // one record beyond the last step so the final transition has a successor
    const std::size_t required =
        static_cast<std::size_t>(cfg.total_episodes()) * data::kHoursPerWeek + 1;
    if (!cfg.data_csv.empty()) {
        auto series = data::load_csv(cfg.data_csv);
        if (series.size() < required) {
            throw Error("insufficient data: need " + std::to_string(required) + " hours, file has " +
                        std::to_string(series.size()));
        }
        return series;
    }
    data::SyntheticConfig s = cfg.synth;
    if (s.seed == 0) throw Error("synthetic seed must be resolved before generation");
    if (static_cast<std::size_t>(s.weeks) * data::kHoursPerWeek < required) {
        s.weeks = cfg.total_episodes() + 1;
    }
    return data::generate_synthetic(s);
}

namespace {

struct RunContext {
    ExperimentConfig cfg;  // resolved copy (seed, synth seed, name)
    std::uint64_t seed = 0;
    fs::path dir;
    std::shared_ptr<const data::TimeSeries> series;
    std::unique_ptr<env::Microgrid> grid_env;
    std::shared_ptr<std::vector<forecast::Forecaster>> forecasters;
};

void attach_forecasts(RunContext& ctx) {
    using forecast::Target;
    const auto targets = {Target::Demand, Target::Price, Target::Pv, Target::Wt};
    ctx.forecasters = std::make_shared<std::vector<forecast::Forecaster>>();
    std::uint64_t stream = kForecastStreamBase;
    for (Target t : targets) {
        ctx.forecasters->push_back(forecast::train_forecaster(
            *ctx.series, t, ctx.cfg.forecaster, ctx.cfg.grid, split_seed(ctx.seed, stream++)));
    }
    auto fcs = ctx.forecasters;
    auto series = ctx.series;
    const auto grid = ctx.cfg.grid;
    const int window = ctx.cfg.forecaster.window;
    ctx.grid_env->set_forecast_provider([fcs, series, grid, window](std::size_t idx) {
        data::Forecasts f;
        if (idx < static_cast<std::size_t>(window)) {
            // not enough history yet (first day only): previous-hour persistence
            f.demand = forecast::normalized_target(*series, idx - 1, forecast::Target::Demand, grid);
            f.price = forecast::normalized_target(*series, idx - 1, forecast::Target::Price, grid);
            f.pv = forecast::normalized_target(*series, idx - 1, forecast::Target::Pv, grid);
            f.wt = forecast::normalized_target(*series, idx - 1, forecast::Target::Wt, grid);
        } else {
            f.demand = (*fcs)[0].predict_at(*series, idx, grid);
            f.price = (*fcs)[1].predict_at(*series, idx, grid);
            f.pv = (*fcs)[2].predict_at(*series, idx, grid);
            f.wt = (*fcs)[3].predict_at(*series, idx, grid);
        }
        return f;
    });
}

void write_episode_csv(const fs::path& file, const std::vector<EpisodeReport>& episodes) {
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << "episode,phase,total_reward,savings_gbp,punish_count,mean_loss,epsilon\n";
    for (const auto& e : episodes) {
        out << e.episode << ',' << (e.evaluation ? "eval" : "train") << ',' << fmt(e.total_reward)
            << ',' << fmt(e.savings_gbp) << ',' << e.punish_count << ',' << fmt(e.mean_loss) << ','
            << fmt(e.epsilon) << '\n';
    }
}

std::vector<EpisodeReport> run_rl(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& grid_env = *ctx.grid_env;
    agents::DqnAgent agent(cfg.resolved_agent(), scenario_observations(cfg.scenario),
                           scenario_actions(cfg.scenario), ctx.seed);

    std::vector<EpisodeReport> episodes;
    data::Observation obs = grid_env.reset(0, true);
    for (int ep = 0; ep < cfg.total_episodes(); ++ep) {
        const bool eval = ep >= cfg.train_episodes;
        obs = grid_env.reset(ep, ep == 0);

        EpisodeReport report;
        report.episode = ep + 1;
        report.evaluation = eval;
        double loss_sum = 0.0;
        int loss_count = 0;

        const bool snapshot_due = algorithm_is_distributional(cfg.algorithm) &&
                                  cfg.snapshot_period > 0 &&
                                  (ep + 1) % cfg.snapshot_period == 0;

        for (int t = 0; t < data::kHoursPerWeek; ++t) {
            const int action = agent.act(obs.values, eval);
            if (eval && (agent.last_act_epsilon() != 0.0 || !agent.last_act_noise_cleared())) {
                throw Error("evaluation purity violated");
            }
            if (snapshot_due && t == 0) {
                const auto snap = export_snapshot(agent, obs.values, ep + 1, t, grid_env);
                write_snapshot_csv(snap,
                                   ctx.dir / "snapshots" /
                                       ("ep" + std::to_string(ep + 1) + ".csv"));
            }
            auto result = grid_env.step(action);
            agent.observe(obs.values, action, result.reward, result.observation.values);
            if (auto loss = agent.train_step()) {
                loss_sum += *loss;
                ++loss_count;
            }
            report.total_reward += result.reward;
            report.savings_gbp += result.info.savings_gbp;
            if (result.info.overflow_mwh > 0.0) ++report.punish_count;
            obs = std::move(result.observation);
        }
        report.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
        report.epsilon = agent.epsilon();
        episodes.push_back(report);
    }
    agent.save_checkpoint((ctx.dir / "checkpoint.txt").string());
    return episodes;
}

std::vector<EpisodeReport> run_ddpg(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& grid_env = *ctx.grid_env;
    baselines::DdpgAgent agent(cfg.ddpg, scenario_observations(cfg.scenario),
                               cfg.grid.x_max_mw, ctx.seed);

    std::vector<EpisodeReport> episodes;
    data::Observation obs = grid_env.reset(0, true);
    for (int ep = 0; ep < cfg.total_episodes(); ++ep) {
        const bool eval = ep >= cfg.train_episodes;
        obs = grid_env.reset(ep, ep == 0);

        EpisodeReport report;
        report.episode = ep + 1;
        report.evaluation = eval;
        double loss_sum = 0.0;
        int loss_count = 0;

        for (int t = 0; t < data::kHoursPerWeek; ++t) {
            const double x = agent.act(obs.values, !eval);
            auto result = grid_env.step_power(x);
            baselines::ContinuousTransition tr;
            tr.state = obs.values;
            tr.action_mw = x;
            tr.reward = result.reward;
            tr.next_state = result.observation.values;
            agent.observe(std::move(tr));
            if (auto losses = agent.train_step()) {
                loss_sum += losses->critic;
                ++loss_count;
            }
            report.total_reward += result.reward;
            report.savings_gbp += result.info.savings_gbp;
            if (result.info.overflow_mwh > 0.0) ++report.punish_count;
            obs = std::move(result.observation);
        }
        report.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
        episodes.push_back(report);
    }
    nn::save_params(agent.actor(), (ctx.dir / "checkpoint.txt").string());
    return episodes;
}

std::vector<EpisodeReport> run_lp(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    auto& grid_env = *ctx.grid_env;

    // price predictions over the evaluation horizon
    auto price_fc =
        forecast::train_forecaster(*ctx.series, forecast::Target::Price, cfg.forecaster,
                                   cfg.grid, split_seed(ctx.seed, kForecastStreamBase + 1));
    const std::size_t eval_start =
        static_cast<std::size_t>(cfg.train_episodes) * data::kHoursPerWeek;
    const std::size_t horizon =
        static_cast<std::size_t>(cfg.eval_episodes) * data::kHoursPerWeek;
    std::vector<double> predicted(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        predicted[h] = data::denormalize_price(
            price_fc.predict_at(*ctx.series, eval_start + h, cfg.grid), cfg.grid);
    }

    // optimize: one coupled LP behind the flag, weekly blocks with carried
    // charge by default
    std::vector<double> schedule;
    schedule.reserve(horizon);
    baselines::LpConfig lp_cfg = cfg.lp;
    lp_cfg.c0 = 0.0;
    if (cfg.lp_full_horizon) {
        const auto sol = baselines::solve_lp(baselines::build_lp(predicted, lp_cfg));
        schedule = sol.schedule;
    } else {
        double carry = 0.0;
        for (int w = 0; w < cfg.eval_episodes; ++w) {
            lp_cfg.c0 = carry;
            std::span<const double> block(predicted.data() + w * data::kHoursPerWeek,
                                          data::kHoursPerWeek);
            const auto sol = baselines::solve_lp(baselines::build_lp(block, lp_cfg));
            schedule.insert(schedule.end(), sol.schedule.begin(), sol.schedule.end());
            carry = sol.charge.back();
        }
    }

    {
        std::ofstream out(ctx.dir / "schedule.csv");
        out << "hour,x_mw\n";
        for (std::size_t h = 0; h < schedule.size(); ++h)
            out << eval_start + h << ',' << fmt(schedule[h]) << '\n';
    }

    // replay through the full nonlinear environment, one report per week
    grid_env.reset(cfg.train_episodes, true);
    std::vector<EpisodeReport> episodes;
    for (int w = 0; w < cfg.eval_episodes; ++w) {
        std::span<const double> block(schedule.data() + w * data::kHoursPerWeek,
                                      data::kHoursPerWeek);
        const auto replayed = baselines::replay_schedule(grid_env, block);
        EpisodeReport report;
        report.episode = cfg.train_episodes + w + 1;
        report.evaluation = true;
        report.savings_gbp = replayed.savings_gbp;
        report.punish_count = replayed.punish_count;
        report.total_reward = replayed.reward_sum;
        episodes.push_back(report);
    }
    return episodes;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
    RunContext ctx;
    ctx.cfg = cfg;
    ctx.seed = seed;
    ctx.cfg.seeds = {seed};
    if (ctx.cfg.synth.seed == 0) ctx.cfg.synth.seed = split_seed(seed, kDataStream);

    std::string name = cfg.run_name.empty()
                           ? std::string(algorithm_name(cfg.algorithm)) + "-" +
                                 scenario_name(cfg.scenario)
                           : cfg.run_name;
    name += "-s" + std::to_string(seed);
    ctx.cfg.run_name = name;
    ctx.dir = fs::path(cfg.out_dir) / name;
    fs::create_directories(ctx.dir / "snapshots");

    ctx.series = std::make_shared<const data::TimeSeries>(load_series(ctx.cfg));
    data::HolidayCalendar holidays;
    if (!cfg.holidays_path.empty()) holidays = data::HolidayCalendar::from_file(cfg.holidays_path);
    ctx.grid_env = std::make_unique<env::Microgrid>(
        ctx.series, cfg.grid, scenario_actions(cfg.scenario), holidays);
    if (scenario_uses_forecasts(cfg.scenario)) attach_forecasts(ctx);

    {
        std::ofstream out(ctx.dir / "config.snapshot");
        out << ctx.cfg.to_config().serialize();
    }

    std::vector<EpisodeReport> episodes;
    switch (cfg.algorithm) {
        case Algorithm::Ddpg: episodes = run_ddpg(ctx); break;
        case Algorithm::Lp: episodes = run_lp(ctx); break;
        default: episodes = run_rl(ctx); break;
    }
    write_episode_csv(ctx.dir / "episodes.csv", episodes);

    RunResult result;
    result.dir = ctx.dir;
    result.algorithm = algorithm_name(cfg.algorithm);
    result.seed = seed;
    result.episodes = std::move(episodes);
    return result;
}

std::vector<RunResult> run_all(const ExperimentConfig& cfg) {
    std::vector<RunResult> results;
    for (std::uint64_t seed : cfg.seeds) results.push_back(run_experiment(cfg, seed));
    return results;
}

double evaluate_checkpoint(const fs::path& run_dir, int first_week, int last_week) {
    const auto cfg = ExperimentConfig::from_config(
        ConfigFile::parse_file((run_dir / "config.snapshot").string()));
    if (cfg.algorithm == Algorithm::Lp)
        throw Error("lp runs have no checkpoint to evaluate");
    const std::uint64_t seed = cfg.seeds.at(0);

    RunContext ctx;
    ctx.cfg = cfg;
    ctx.seed = seed;
    ctx.dir = run_dir;
    ctx.series = std::make_shared<const data::TimeSeries>(load_series(cfg));
    data::HolidayCalendar holidays;
    if (!cfg.holidays_path.empty()) holidays = data::HolidayCalendar::from_file(cfg.holidays_path);
    ctx.grid_env = std::make_unique<env::Microgrid>(
        ctx.series, cfg.grid, scenario_actions(cfg.scenario), holidays);
    if (scenario_uses_forecasts(cfg.scenario)) attach_forecasts(ctx);

    if (last_week <= first_week) throw Error("evaluate: empty week range");
    if (static_cast<std::size_t>(last_week) * data::kHoursPerWeek + 1 > ctx.series->size())
        throw Error("evaluate: week range outside the data");

    double savings = 0.0;
    auto& grid_env = *ctx.grid_env;
    if (cfg.algorithm == Algorithm::Ddpg) {
        baselines::DdpgAgent agent(cfg.ddpg, scenario_observations(cfg.scenario),
                                   cfg.grid.x_max_mw, seed);
        nn::load_params(agent.actor(), (run_dir / "checkpoint.txt").string());
        auto obs = grid_env.reset(first_week, true);
        for (int t = 0; t < (last_week - first_week) * data::kHoursPerWeek; ++t) {
            auto r = grid_env.step_power(agent.act(obs.values, false));
            savings += r.info.savings_gbp;
            obs = std::move(r.observation);
        }
    } else {
        agents::DqnAgent agent(cfg.resolved_agent(), scenario_observations(cfg.scenario),
                               scenario_actions(cfg.scenario), seed);
        agent.load_checkpoint((run_dir / "checkpoint.txt").string());
        auto obs = grid_env.reset(first_week, true);
        for (int t = 0; t < (last_week - first_week) * data::kHoursPerWeek; ++t) {
            auto r = grid_env.step(agent.act(obs.values, true));
            savings += r.info.savings_gbp;
            obs = std::move(r.observation);
        }
    }
    return savings;
}

double percentage_diff(double value, double baseline) {
    if (baseline == 0.0) throw Error("percentage difference against a zero baseline");
    return (value - baseline) / baseline * 100.0;
}

std::vector<EpisodeReport> read_episode_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(file.string() + ": empty");
    std::vector<EpisodeReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        EpisodeReport e;
        std::getline(ss, field, ',');
        e.episode = std::stoi(field);
        std::getline(ss, field, ',');
        e.evaluation = field == "eval";
        std::getline(ss, field, ',');
        e.total_reward = std::stod(field);
        std::getline(ss, field, ',');
        e.savings_gbp = std::stod(field);
        std::getline(ss, field, ',');
        e.punish_count = std::stoi(field);
        std::getline(ss, field, ',');
        e.mean_loss = std::stod(field);
        std::getline(ss, field, ',');
        e.epsilon = std::stod(field);
        out.push_back(e);
    }
    return out;
}

std::vector<AggregateRow> aggregate(const std::vector<fs::path>& run_dirs, bool against_dqn) {
    if (run_dirs.empty()) throw Error("aggregate: no run directories given");
    std::map<std::string, std::vector<double>> by_algo;
    for (const auto& dir : run_dirs) {
        const auto snapshot = dir / "config.snapshot";
        const auto episodes_file = dir / "episodes.csv";
        if (!fs::exists(snapshot) || !fs::exists(episodes_file))
            throw Error("aggregate: " + dir.string() + " is not a completed run directory");
        const auto cfg_file = ConfigFile::parse_file(snapshot.string());
        const std::string algo = cfg_file.get_string("run", "algorithm", "?");
        const auto episodes = read_episode_csv(episodes_file);
        double savings = 0.0;
        for (const auto& e : episodes)
            if (e.evaluation) savings += e.savings_gbp;
        by_algo[algo].push_back(savings);
    }

    std::optional<double> dqn_mean;
    if (by_algo.count("dqn")) {
        const auto& v = by_algo["dqn"];
        dqn_mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    }
    if (against_dqn && !dqn_mean)
        throw Error("aggregate: percentage vs dqn requested but no dqn run present");

    std::vector<AggregateRow> rows;
    for (const auto& [algo, values] : by_algo) {
        AggregateRow row;
        row.algorithm = algo;
        row.runs = static_cast<int>(values.size());
        row.mean_savings_gbp = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
        double var = 0.0;
        for (double v : values) var += (v - row.mean_savings_gbp) * (v - row.mean_savings_gbp);
        row.std_savings_gbp = values.size() > 1 ? std::sqrt(var / (values.size() - 1)) : 0.0;
        if (against_dqn && algo != "dqn") {
            row.pct_vs_dqn = percentage_diff(row.mean_savings_gbp, *dqn_mean);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_aggregate(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %5s %16s %14s %10s\n", "algorithm", "runs",
                  "mean savings", "std", "vs dqn");
    out << buf;
    for (const auto& r : rows) {
        std::string pct = "-";
        if (r.pct_vs_dqn) {
            std::snprintf(buf, sizeof(buf), "%+.2f%%", *r.pct_vs_dqn);
            pct = buf;
        }
        std::snprintf(buf, sizeof(buf), "%-10s %5d %16.2f %14.2f %10s\n", r.algorithm.c_str(),
                      r.runs, r.mean_savings_gbp, r.std_savings_gbp, pct.c_str());
        out << buf;
    }
    return out.str();
}

DistributionSnapshot export_snapshot(agents::DqnAgent& agent, std::span<const double> obs,
                                     int episode, int step, const env::Microgrid& grid_env) {
    DistributionSnapshot snap;
    snap.episode = episode;
    snap.step = step;
    snap.probabilities = agent.value_distribution(obs);  // throws for non-distributional agents
    snap.supports = agent.atom_supports();
    const auto values = agent.action_values(obs);
    snap.chosen_action = agents::argmax_index(values);
    snap.charge_mwh = grid_env.state().charge_mwh;
    const auto& rec = grid_env.series().at(grid_env.state().index);
    snap.price_gbp_mwh = rec.price_gbp_mwh;
    snap.demand_mwh = rec.demand_mwh;
    return snap;
}

void write_snapshot_csv(const DistributionSnapshot& snap, const fs::path& file) {
    std::ofstream out(file);
    if (!out) throw Error("cannot write " + file.string());
    out << "episode,step,chosen_action,charge_mwh,price_gbp_mwh,demand_mwh\n";
    out << snap.episode << ',' << snap.step << ',' << snap.chosen_action << ','
        << fmt(snap.charge_mwh) << ',' << fmt(snap.price_gbp_mwh) << ',' << fmt(snap.demand_mwh)
        << '\n';
    out << "support";
    for (std::size_t a = 0; a < snap.probabilities.size(); ++a) out << ",a" << a;
    out << '\n';
    for (std::size_t i = 0; i < snap.supports.size(); ++i) {
        out << fmt(snap.supports[i]);
        for (const auto& action_probs : snap.probabilities) out << ',' << fmt(action_probs[i]);
        out << '\n';
    }
}

DistributionSnapshot read_snapshot_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file.string());
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    DistributionSnapshot snap;
    {
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        snap.episode = std::stoi(field);
        std::getline(ss, field, ',');
        snap.step = std::stoi(field);
        std::getline(ss, field, ',');
        snap.chosen_action = std::stoi(field);
        std::getline(ss, field, ',');
        snap.charge_mwh = std::stod(field);
        std::getline(ss, field, ',');
        snap.price_gbp_mwh = std::stod(field);
        std::getline(ss, field, ',');
        snap.demand_mwh = std::stod(field);
    }
    std::getline(in, line);  // support header: infer the action count
    const auto actions = std::count(line.begin(), line.end(), ',');
    snap.probabilities.assign(actions, {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        snap.supports.push_back(std::stod(field));
        for (auto& action_probs : snap.probabilities) {
            std::getline(ss, field, ',');
            action_probs.push_back(std::stod(field));
        }
    }
    return snap;
}

}  // namespace gridrl::harness
