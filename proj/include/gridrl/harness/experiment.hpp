#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridrl/agents/dqn_agent.hpp"
#include "gridrl/baselines/ddpg.hpp"
#include "gridrl/baselines/lp.hpp"
#include "gridrl/data/synthetic.hpp"
#include "gridrl/env/microgrid.hpp"
#include "gridrl/forecast/forecast.hpp"
#include "gridrl/harness/config_file.hpp"

namespace gridrl::harness {

enum class Algorithm { Dqn, Ddqn, D3qn, PerDqn, MsDqn, NnDqn, C51, Rainbow, Ddpg, Lp };
enum class Scenario { Basic5, Basic9, Forecast5, Forecast9 };

Algorithm parse_algorithm(const std::string& name);
Scenario parse_scenario(const std::string& name);
const char* algorithm_name(Algorithm a);
const char* scenario_name(Scenario s);

int scenario_observations(Scenario s);  // 8 or 12
int scenario_actions(Scenario s);       // 5 or 9
bool scenario_uses_forecasts(Scenario s);
bool algorithm_is_distributional(Algorithm a);

/// Full description of one experiment: the protocol is 100 training episodes
/// followed by 100 evaluation episodes of one week each, with learning left
/// on throughout.
struct ExperimentConfig {
    Algorithm algorithm = Algorithm::Dqn;
    Scenario scenario = Scenario::Basic5;

    agents::AgentConfig agent;  // flags are overwritten from `algorithm`
    baselines::DdpgConfig ddpg;
    baselines::LpConfig lp;
    bool lp_full_horizon = false;
    forecast::ForecastConfig forecaster;
    env::GridConfig grid;

    std::string data_csv;  // empty -> synthetic
    data::SyntheticConfig synth;
    std::string holidays_path;

    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "runs";
    std::string run_name;  // default <algo>-<scenario>-s<seed>

    int train_episodes = 100;
    int eval_episodes = 100;
    int snapshot_period = 25;  // episodes between value-distribution snapshots, 0 = off

    int total_episodes() const { return train_episodes + eval_episodes; }

    /// Agent hyperparameters with the feature flags implied by `algorithm`.
    /// n_steps and the PER offset follow the algorithm's preset unless they
    /// were explicitly moved off their defaults.
    agents::AgentConfig resolved_agent() const;

    static ExperimentConfig from_config(const ConfigFile& file);
    ConfigFile to_config() const;
};

struct EpisodeReport {
    int episode = 0;  // 1-based
    bool evaluation = false;
    double total_reward = 0.0;
    double savings_gbp = 0.0;
    int punish_count = 0;
    double mean_loss = 0.0;
    double epsilon = 0.0;
};

struct RunResult {
    std::filesystem::path dir;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::vector<EpisodeReport> episodes;

    double eval_savings_gbp() const;
};

/// Loads the configured CSV or generates the synthetic series (padded by one
/// week so the final step still has a successor record).
data::TimeSeries load_series(const ExperimentConfig& cfg);

/// Executes one seeded run end to end and writes
///   <out>/<name>/episodes.csv, config.snapshot, checkpoint.txt, snapshots/
/// Deterministic: identical config and seed give identical reports.
RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

/// All configured seeds in sequence.
std::vector<RunResult> run_all(const ExperimentConfig& cfg);

/// Greedy rollout of a stored checkpoint over [first_week, last_week);
/// no learning, exploration off. Returns total savings in GBP.
double evaluate_checkpoint(const std::filesystem::path& run_dir, int first_week, int last_week);

// -- aggregation -------------------------------------------------------------

struct AggregateRow {
    std::string algorithm;
    int runs = 0;
    double mean_savings_gbp = 0.0;
    double std_savings_gbp = 0.0;
    std::optional<double> pct_vs_dqn;
};

/// Table 2's convention: percentage difference of a score against the DQN
/// baseline score.
double percentage_diff(double value, double baseline);

/// Collects eval-phase savings per algorithm from completed run directories.
/// Throws when a baseline percentage is requested but no dqn run is present.
std::vector<AggregateRow> aggregate(const std::vector<std::filesystem::path>& run_dirs,
                                    bool against_dqn = true);

std::string format_aggregate(const std::vector<AggregateRow>& rows);

/// Reads one run's episodes.csv back (round-trips what run_experiment wrote).
std::vector<EpisodeReport> read_episode_csv(const std::filesystem::path& file);

// -- value-distribution snapshots ---------------------------------------------

struct DistributionSnapshot {
    int episode = 0;
    int step = 0;
    int chosen_action = 0;
    double charge_mwh = 0.0;
    double price_gbp_mwh = 0.0;
    double demand_mwh = 0.0;
    std::vector<double> supports;
    std::vector<std::vector<double>> probabilities;  // [action][atom]
};

/// Captures Z(s, .) for the agent's current observation. Distributional
/// agents only; others get an unsupported-operation error.
DistributionSnapshot export_snapshot(agents::DqnAgent& agent, std::span<const double> obs,
                                     int episode, int step, const env::Microgrid& grid_env);

void write_snapshot_csv(const DistributionSnapshot& snap, const std::filesystem::path& file);
DistributionSnapshot read_snapshot_csv(const std::filesystem::path& file);

}  // namespace gridrl::harness
