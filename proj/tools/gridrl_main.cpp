#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gridrl/data/synthetic.hpp"
#include "gridrl/harness/experiment.hpp"

namespace {

using namespace gridrl;

harness::ExperimentConfig build_config(const std::string& config_path, const std::string& algo,
                                       const std::string& scenario, const std::string& seeds,
                                       const std::string& data, const std::string& out) {
    harness::ConfigFile file;
    if (!config_path.empty()) file = harness::ConfigFile::parse_file(config_path);
    // command-line flags override file values
    if (!algo.empty()) file.set("run", "algorithm", algo);
    if (!scenario.empty()) file.set("run", "scenario", scenario);
    if (!seeds.empty()) file.set("run", "seeds", seeds);
    if (!data.empty()) file.set("data", "csv", data);
    if (!out.empty()) file.set("run", "out_dir", out);
    return harness::ExperimentConfig::from_config(file);
}

void add_common_flags(CLI::App* cmd, std::string& config_path, std::string& algo,
                      std::string& scenario, std::string& seeds, std::string& data,
                      std::string& out) {
    cmd->add_option("--config", config_path, "experiment config file");
    cmd->add_option("--algo", algo, "dqn|ddqn|d3qn|per|ms|nn|c51|rainbow|ddpg|lp");
    cmd->add_option("--scenario", scenario, "basic5|basic9|forecast5|forecast9");
    cmd->add_option("--seed", seeds, "comma-separated seed list");
    cmd->add_option("--data", data, "hourly CSV (omit for synthetic data)");
    cmd->add_option("--out", out, "output directory for runs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"microgrid battery arbitrage with the Rainbow DQN family"};
    app.require_subcommand(1);

    std::string config_path, algo, scenario, seeds, data, out;

    auto* train = app.add_subcommand("train", "run the 200-episode train/eval protocol");
    add_common_flags(train, config_path, algo, scenario, seeds, data, out);

    auto* evaluate = app.add_subcommand("evaluate", "greedy rollout of a stored checkpoint");
    std::string run_dir;
    int eval_first = 100, eval_last = 200;
    evaluate->add_option("run", run_dir, "completed run directory")->required();
    evaluate->add_option("--first-week", eval_first, "first week (default 100)");
    evaluate->add_option("--last-week", eval_last, "one past the last week (default 200)");

    auto* lp_solve = app.add_subcommand("lp-solve", "price-taking LP benchmark");
    add_common_flags(lp_solve, config_path, algo, scenario, seeds, data, out);

    auto* forecast_train = app.add_subcommand("forecast-train", "train one forecaster");
    std::string fc_target = "demand", fc_out;
    std::uint64_t fc_seed = 1;
    forecast_train->add_option("--config", config_path, "experiment config file");
    forecast_train->add_option("--data", data, "hourly CSV (omit for synthetic data)");
    forecast_train->add_option("--target", fc_target, "demand|price|pv|wt");
    forecast_train->add_option("--seed", fc_seed, "training seed");
    forecast_train->add_option("--out", fc_out, "checkpoint path for the trained net");

    auto* agg = app.add_subcommand("aggregate", "comparison table over finished runs");
    std::vector<std::string> agg_dirs;
    bool no_baseline = false;
    agg->add_option("runs", agg_dirs, "run directories")->required();
    agg->add_flag("--no-baseline", no_baseline, "skip the percentage-vs-dqn column");

    auto* synth = app.add_subcommand("synth-data", "generate a synthetic dataset CSV");
    int synth_weeks = 200;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "synthetic.csv";
    synth->add_option("--weeks", synth_weeks, "number of weeks");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            auto cfg = build_config(config_path, algo, scenario, seeds, data, out);
            for (auto result : harness::run_all(cfg)) {
                std::cout << result.dir.string() << ": evaluation savings "
                          << result.eval_savings_gbp() << " GBP\n";
            }
        } else if (evaluate->parsed()) {
            const double savings =
                harness::evaluate_checkpoint(run_dir, eval_first, eval_last);
            std::cout << "savings over weeks [" << eval_first << ", " << eval_last
                      << "): " << savings << " GBP\n";
        } else if (lp_solve->parsed()) {
            auto cfg = build_config(config_path, "lp", scenario, seeds, data, out);
            for (auto result : harness::run_all(cfg)) {
                std::cout << result.dir.string() << ": replayed LP savings "
                          << result.eval_savings_gbp() << " GBP\n";
            }
        } else if (forecast_train->parsed()) {
            auto cfg = build_config(config_path, "", "", "", data, "");
            cfg.synth.seed = cfg.synth.seed ? cfg.synth.seed : fc_seed;
            const auto series = harness::load_series(cfg);
            auto fc = forecast::train_forecaster(series, forecast::parse_target(fc_target),
                                                 cfg.forecaster, cfg.grid, fc_seed);
            const auto eval = forecast::evaluate_forecaster(
                fc, series, fc.train_end() + data::kHoursPerDay, series.size(), cfg.grid);
            std::cout << fc_target << ": model MAPE " << eval.model_mape
                      << "%, persistence-24 MAPE " << eval.persistence_mape << "%\n";
            if (!fc_out.empty()) {
                fc.save(fc_out);
                std::cout << "saved to " << fc_out << "\n";
            }
        } else if (agg->parsed()) {
            std::vector<std::filesystem::path> dirs(agg_dirs.begin(), agg_dirs.end());
            const auto rows = harness::aggregate(dirs, !no_baseline);
            std::cout << harness::format_aggregate(rows);
        } else if (synth->parsed()) {
            data::SyntheticConfig cfg;
            cfg.weeks = synth_weeks;
            cfg.seed = synth_seed;
            data::save_csv(data::generate_synthetic(cfg), synth_out);
            std::cout << "wrote " << synth_weeks << " weeks to " << synth_out << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
