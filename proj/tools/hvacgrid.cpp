// hvacgrid command-line interface.
//
//   hvacgrid train    --scenario combo|drl [--config FILE] ...
//   hvacgrid evaluate --scenario mpc|combo|drl [--checkpoint FILE] ...
//   hvacgrid compare  RUN_DIR RUN_DIR [...] --out DIR
//   hvacgrid simulate [--mdot X] [--p-ess X] [--u-dg X] [--days N]
//
// Exit codes: 0 success, 2 configuration or usage error, 1 runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hvacgrid/config.hpp"
#include "hvacgrid/harness.hpp"

namespace fs = std::filesystem;
using namespace hvacgrid;

namespace {

struct Common {
    std::string config;
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    std::string out;
    std::string weather;
    std::string prices;
    std::size_t days = 0;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_epochs, bool with_days) {
    cmd->add_option("-c,--config", c.config, "Experiment config file (JSON); built-in defaults when omitted");
    cmd->add_option("-s,--scenario", c.scenario, "Scenario: mpc, combo or drl")
        ->check(CLI::IsMember({"mpc", "combo", "drl"}));
    cmd->add_option("--seed", c.seed, "Run a single seed instead of the config's seed list");
    if (with_epochs) cmd->add_option("--epochs", c.epochs, "Training episodes")->check(CLI::PositiveNumber);
    if (with_days) cmd->add_option("--days", c.days, "Number of evaluation days")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--out", c.out, "Output directory");
    cmd->add_option("--weather", c.weather, "Weather CSV (timestamp,t_out_c,irradiance_kw_m2)");
    cmd->add_option("--prices", c.prices, "Price CSV (timestamp,buy_price)");
    cmd->add_flag("-v,--verbose", c.verbose, "Progress messages on stderr");
}

ExperimentConfig build_config(const Common& c, CLI::App* cmd) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
    Overrides o;
    if (!c.scenario.empty()) o.scenario = c.scenario;
    if (cmd->count("--seed")) o.seed = c.seed;
    if (cmd->get_option_no_throw("--epochs") && cmd->count("--epochs")) o.epochs = c.epochs;
    if (cmd->get_option_no_throw("--days") && cmd->count("--days")) o.test_days = c.days;
    if (!c.out.empty()) o.output_dir = c.out;
    if (!c.weather.empty()) o.weather = c.weather;
    if (!c.prices.empty()) o.prices = c.prices;
    apply_overrides(cfg, o);
    cfg.validate();
    return cfg;
}

void log(const Common& c, const std::string& msg) {
    if (c.verbose) std::cerr << msg << "\n";
}

int cmd_train(const Common& c, CLI::App* cmd) {
    ExperimentConfig cfg = build_config(c, cmd);
    if (cfg.scenario == "mpc") throw ConfigError("train needs a learning scenario (combo or drl)");
    const LoadedData data = load_data(cfg);
    for (std::uint64_t seed : cfg.seeds) {
        log(c, "training " + cfg.scenario + " seed " + std::to_string(seed) + " for " +
                   std::to_string(cfg.effective_epochs()) + " episodes");
        auto t = train_agent(cfg, data.dataset, seed);
        const fs::path dir = run_dir(cfg, seed);
        fs::create_directories(dir);
        ExperimentConfig snap = cfg;
        snap.seeds = {seed};
        snap.data.weather = fs::absolute(cfg.weather_path()).string();
        snap.data.prices = fs::absolute(cfg.prices_path()).string();
        write_text(dir / "config.json", to_json(snap).dump(2) + "\n");
        t.agent.save((dir / "checkpoint.txt").string());
        write_training_log(dir, t.log);
        std::cout << (dir / "checkpoint.txt").string() << "\n";
    }
    return 0;
}

int cmd_evaluate(const Common& c, const std::string& checkpoint, CLI::App* cmd) {
    ExperimentConfig cfg = build_config(c, cmd);
    const LoadedData data = load_data(cfg);
    for (std::uint64_t seed : cfg.seeds) {
        const fs::path dir = run_dir(cfg, seed);
        std::vector<SlotRecord> recs;
        if (cfg.scenario == "mpc") {
            log(c, "running mpc on " + std::to_string(cfg.data.test_days) + " days");
            recs = run_mpc(cfg, data.dataset, test_days(cfg));
        } else {
            const fs::path ck = checkpoint.empty() ? dir / "checkpoint.txt" : fs::path(checkpoint);
            if (!fs::exists(ck)) throw ConfigError("checkpoint not found: " + ck.string());
            const auto agent = ddpg::DdpgAgent::load(ck.string());
            log(c, "deploying " + ck.string());
            recs = run_agent(cfg, data.dataset, agent);
        }
        const Summary s = write_run_outputs(dir, cfg, seed, data, recs);
        std::cout << summary_csv_header() << "\n" << summary_csv_row(s) << "\n";
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& runs, const std::string& out) {
    std::vector<fs::path> dirs(runs.begin(), runs.end());
    const Comparison cmp = compare_runs(dirs);
    fs::create_directories(out);
    write_text(fs::path(out) / "comparison.csv", comparison_csv(cmp));
    write_text(fs::path(out) / "comparison.json", comparison_json(cmp).dump(2) + "\n");
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const auto& r = cmp.rows[i];
        const auto src = dirs[i] / "rmse.csv";
        if (fs::exists(src))
            write_text(fs::path(out) / ("rmse_" + r.scenario + "_seed" + std::to_string(r.seed) + ".csv"),
                       read_text(src));
    }
    std::cout << comparison_csv(cmp);
    return 0;
}

int cmd_simulate(const Common& c, CLI::App* cmd, double mdot, double p_ess, double u_dg) {
    ExperimentConfig cfg = build_config(c, cmd);
    const LoadedData data = load_data(cfg);
    Plant plant(cfg.env, data.dataset);
    std::vector<SlotRecord> recs;
    const std::vector<double> mdots(cfg.env.zones.size(), mdot);
    for (std::size_t day : test_days(cfg)) {
        plant.reset(day);
        for (std::size_t t = 0; t < cfg.env.slots_per_episode; ++t) {
            SlotRecord r = plant.apply(mdots, p_ess, u_dg);
            r.reward = -r.cost;
            recs.push_back(std::move(r));
        }
    }
    if (c.out.empty()) {
        write_slot_log(std::cout, recs);
    } else {
        fs::create_directories(c.out);
        std::ostringstream os;
        write_slot_log(os, recs);
        write_text(fs::path(c.out) / "slots.csv", os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building HVAC and microgrid co-simulation with MPC and DDPG controllers"};
    app.require_subcommand(1);

    Common tc, ec, sc;
    auto* train = app.add_subcommand("train", "Train a DDPG agent (combo or drl) and write its checkpoint");
    add_common(train, tc, true, false);

    std::string checkpoint;
    auto* evaluate = app.add_subcommand("evaluate", "Run a controller on the test days and write metrics");
    add_common(evaluate, ec, false, true);
    evaluate->add_option("--checkpoint", checkpoint, "Agent checkpoint (defaults to the run directory's)");

    std::vector<std::string> runs;
    std::string cmp_out = "comparison";
    auto* compare = app.add_subcommand("compare", "Merge run summaries into one comparison table");
    compare->add_option("runs", runs, "Run directories holding summary.json")->required();
    compare->add_option("-o,--out", cmp_out, "Output directory");

    double mdot = 0.0, p_ess = 0.0, u_dg = 0.0;
    auto* simulate = app.add_subcommand("simulate", "Step the plant open loop under constant inputs");
    add_common(simulate, sc, false, true);
    simulate->add_option("--mdot", mdot, "Airflow per zone, kg/s");
    simulate->add_option("--p-ess", p_ess, "Battery power, kW (negative discharges)");
    simulate->add_option("--u-dg", u_dg, "Diesel command, kW");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*train) return cmd_train(tc, train);
        if (*evaluate) return cmd_evaluate(ec, checkpoint, evaluate);
        if (*compare) return cmd_compare(runs, cmp_out);
        if (*simulate) return cmd_simulate(sc, simulate, mdot, p_ess, u_dg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
