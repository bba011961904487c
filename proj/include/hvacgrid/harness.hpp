#pragma once

// Experiment orchestration: closed-loop runs of the three controllers,
// per-slot logs, 3-hour RMSE windows and the mean/std summary table.
//
// Run directory layout (one per scenario and seed):
//   config.json    full config snapshot; rerunning it reproduces the run
//   slots.csv      one row per simulated slot
//   rmse.csv       per-window RMSE, one column per zone plus all zones
//   summary.csv    one-row table (same numbers as summary.json)
//   summary.json
//   training.csv   per-episode returns (learning scenarios)
//   checkpoint.txt agent parameters (learning scenarios)

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hvacgrid/config.hpp"
#include "hvacgrid/data.hpp"
#include "hvacgrid/ddpg.hpp"
#include "hvacgrid/envs.hpp"
#include "hvacgrid/errors.hpp"
#include "hvacgrid/mpc.hpp"
#include "hvacgrid/numfmt.hpp"

namespace hvacgrid {

// --- data --------------------------------------------------------------------

struct LoadedData {
    std::shared_ptr<const Dataset> dataset;
    std::uint64_t fingerprint = 0;
    std::size_t clamped_irradiance = 0;
};

/// FNV-1a over the shortest round-trip text of every value.
inline std::uint64_t fingerprint(const Dataset& d) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double v) {
        for (char c : fmt_double(v) + ";") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
    };
    for (std::size_t i = 0; i < d.slots(); ++i) {
        mix(d.t_out[i]);
        mix(d.irradiance[i]);
        mix(d.price[i]);
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

inline LoadedData load_data(const ExperimentConfig& cfg) {
    const auto w = data::load_weather(cfg.weather_path(), cfg.env.slot_hours);
    const auto p = data::load_prices(cfg.prices_path(), cfg.env.slot_hours);
    auto ds = std::make_shared<Dataset>(Dataset::from_series(w, p));
    const std::size_t need = cfg.data.train_days + cfg.data.test_days;
    if (ds->days() < need)
        throw ConfigError("dataset covers " + std::to_string(ds->days()) + " days; config needs " +
                          std::to_string(need) + " (train_days + test_days)");
    LoadedData out;
    out.fingerprint = fingerprint(*ds);
    out.clamped_irradiance = w.clamped_irradiance;
    out.dataset = std::move(ds);
    return out;
}

inline std::vector<std::size_t> train_days(const ExperimentConfig& c) {
    std::vector<std::size_t> d;
    for (std::size_t i = 0; i < c.data.train_days; ++i) d.push_back(i);
    return d;
}

inline std::vector<std::size_t> test_days(const ExperimentConfig& c) {
    std::vector<std::size_t> d;
    for (std::size_t i = 0; i < c.data.test_days; ++i) d.push_back(c.data.train_days + i);
    return d;
}

// --- controllers -------------------------------------------------------------

/// Diesel command for the MPC scenario: run the generator only when power is
/// expensive and PV plus the planned battery discharge leave demand uncovered.
inline double diesel_command(const DispatchConfig& d, const DieselGen& dg, double price, double p_net, double p_ess) {
    if (!d.diesel_enabled || price <= d.price_threshold) return 0.0;
    const double uncovered = p_net + p_ess;
    return uncovered > 0.0 ? std::min(uncovered, dg.max_output_kw) : 0.0;
}

/// Closed-loop integrated MPC over the given days.
inline std::vector<SlotRecord> run_mpc(const ExperimentConfig& cfg, std::shared_ptr<const Dataset> data,
                                       const std::vector<std::size_t>& days) {
    Plant plant(cfg.env, data);
    MpcController mpc(mpc_model_from(cfg.env), cfg.mpc);
    std::vector<SlotRecord> out;
    for (std::size_t day : days) {
        plant.reset(day);
        mpc.reset();
        for (std::size_t t = 0; t < cfg.env.slots_per_episode; ++t) {
            const auto fc = data->forecast(plant.global_slot(), cfg.mpc.horizon);
            const auto act = mpc.receding_step(plant.temps(), plant.soc(), plant.p_dg(), fc);
            // forecast of this slot's net demand under the chosen airflow
            const auto pred = predict_temperatures(mpc.model(), plant.temps(), fc.t_out, act.mdots, 1, cfg.env.slot_hours);
            const double p_h = hvac_power(cfg.env.hvac, act.mdots, pred);
            const double p_net = net_demand(p_h, cfg.env.p_const_kw, pv_power(cfg.env.pv, plant.irradiance()));
            const double u_dg = diesel_command(cfg.dispatch, cfg.env.diesel, plant.price(), p_net, act.p_ess);
            SlotRecord r = plant.apply(act.mdots, act.p_ess, u_dg);
            r.w_energy = cfg.mpc.w_energy;
            r.w_comfort = cfg.mpc.w_comfort;
            r.reward = -r.cost;
            out.push_back(std::move(r));
        }
    }
    return out;
}

inline std::unique_ptr<PlantEnv> make_env(const ExperimentConfig& cfg, std::shared_ptr<const Dataset> data,
                                          std::vector<std::size_t> days) {
    if (cfg.scenario == "combo") return std::make_unique<ComboEnv>(cfg.env, std::move(data), std::move(days), cfg.mpc);
    if (cfg.scenario == "drl") return std::make_unique<PureEnv>(cfg.env, std::move(data), std::move(days));
    throw ConfigError("scenario '" + cfg.scenario + "' has no learning environment");
}

inline ddpg::DdpgAgent make_agent(const ExperimentConfig& cfg, const ddpg::Environment& env, std::uint64_t seed) {
    return ddpg::DdpgAgent(cfg.ddpg, env.state_dim(), env.action_low(), env.action_high(), seed, env.state_center(),
                           env.state_scale());
}

struct TrainedAgent {
    ddpg::DdpgAgent agent;
    ddpg::TrainingLog log;
};

inline TrainedAgent train_agent(const ExperimentConfig& cfg, std::shared_ptr<const Dataset> data, std::uint64_t seed) {
    auto env = make_env(cfg, std::move(data), train_days(cfg));
    auto agent = make_agent(cfg, *env, seed);
    auto log = ddpg::train(agent, *env, cfg.effective_epochs(), cfg.env.slots_per_episode, seed ^ 0x9e3779b97f4a7c15ULL);
    return {std::move(agent), std::move(log)};
}

/// Greedy deployment on the test days, recording every slot.
inline std::vector<SlotRecord> run_agent(const ExperimentConfig& cfg, std::shared_ptr<const Dataset> data,
                                         const ddpg::DdpgAgent& agent) {
    auto env = make_env(cfg, std::move(data), test_days(cfg));
    std::vector<SlotRecord> out;
    env->set_recorder(&out);
    std::vector<std::size_t> idx(env->num_days());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    ddpg::deploy(agent, *env, idx, cfg.env.slots_per_episode);
    return out;
}

/// Mean episode return of a policy drawing every action uniformly from the
/// action box, one episode per environment day (repeated `rounds` times).
inline double random_policy_return(ddpg::Environment& env, std::size_t slots, std::size_t rounds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto lo = env.action_low();
    const auto hi = env.action_high();
    double total = 0.0;
    std::size_t episodes = 0;
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t d = 0; d < env.num_days(); ++d) {
            env.reset(d);
            double ret = 0.0;
            std::vector<double> a(lo.size());
            for (std::size_t t = 0; t < slots; ++t) {
                for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::uniform_real_distribution<double>(lo[k], hi[k])(rng);
                ret += env.step(a).reward;
            }
            total += ret;
            ++episodes;
        }
    }
    return total / static_cast<double>(episodes);
}

// --- per-slot log ------------------------------------------------------------

inline const std::vector<std::string>& slot_log_scalar_columns() {
    static const std::vector<std::string> cols{"day",    "slot",   "t_out",  "irradiance", "price",  "p_hvac",
                                               "p_solar", "p_const", "p_ess", "p_dg",       "p_grid", "soc",
                                               "cost",   "reward", "w_energy", "w_comfort"};
    return cols;
}

inline void write_slot_log(std::ostream& os, const std::vector<SlotRecord>& recs) {
    const std::size_t n = recs.empty() ? 0 : recs.front().temps.size();
    bool first = true;
    for (const auto& c : slot_log_scalar_columns()) {
        os << (first ? "" : ",") << c;
        first = false;
    }
    for (std::size_t i = 0; i < n; ++i) os << ",temp_" << i + 1;
    for (std::size_t i = 0; i < n; ++i) os << ",mdot_" << i + 1;
    os << '\n';
    for (const auto& r : recs) {
        os << r.day << ',' << r.slot;
        for (double v : {r.t_out, r.irradiance, r.price, r.p_hvac, r.p_solar, r.p_const, r.p_ess, r.p_dg, r.p_grid,
                         r.soc, r.cost, r.reward, r.w_energy, r.w_comfort})
            os << ',' << fmt_double(v);
        for (double v : r.temps) os << ',' << fmt_double(v);
        for (double v : r.mdots) os << ',' << fmt_double(v);
        os << '\n';
    }
}

inline std::vector<SlotRecord> read_slot_log(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("slot log: missing header", 1);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) header.push_back(f);
    }
    const std::size_t ns = slot_log_scalar_columns().size();
    if (header.size() < ns || (header.size() - ns) % 2 != 0) throw ParseError("slot log: unexpected header", 1);
    for (std::size_t i = 0; i < ns; ++i)
        if (header[i] != slot_log_scalar_columns()[i]) throw ParseError("slot log: unexpected column " + header[i], 1);
    const std::size_t n = (header.size() - ns) / 2;
    std::vector<SlotRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            const auto x = parse_double(f);
            if (!x) throw ParseError("slot log: bad number '" + f + "'", lineno);
            v.push_back(*x);
        }
        if (v.size() != header.size()) throw ParseError("slot log: wrong field count", lineno);
        SlotRecord r;
        r.day = static_cast<std::size_t>(v[0]);
        r.slot = static_cast<std::size_t>(v[1]);
        double* scalars[] = {&r.t_out, &r.irradiance, &r.price, &r.p_hvac, &r.p_solar, &r.p_const, &r.p_ess,
                             &r.p_dg,  &r.p_grid,     &r.soc,   &r.cost,   &r.reward,  &r.w_energy, &r.w_comfort};
        for (std::size_t k = 0; k < ns - 2; ++k) *scalars[k] = v[2 + k];
        r.temps.assign(v.begin() + static_cast<std::ptrdiff_t>(ns), v.begin() + static_cast<std::ptrdiff_t>(ns + n));
        r.mdots.assign(v.begin() + static_cast<std::ptrdiff_t>(ns + n), v.end());
        out.push_back(std::move(r));
    }
    return out;
}

// --- metrics -----------------------------------------------------------------

struct RmseSeries {
    std::vector<std::vector<double>> per_zone;  // [zone][window]
    std::vector<double> all_zones;              // [window]
};

/// Root-mean-square deviation from each zone's setpoint over consecutive
/// windows of `window_hours`; temps is [slot][zone].
inline RmseSeries rmse_windows(const std::vector<std::vector<double>>& temps, const std::vector<double>& desired,
                               double slot_hours, double window_hours = 3.0) {
    const double ratio = window_hours / slot_hours;
    const auto w = static_cast<std::size_t>(std::llround(ratio));
    if (w == 0 || std::abs(ratio - static_cast<double>(w)) > 1e-9)
        throw InputError("rmse_windows: window must be a whole number of slots");
    if (temps.empty() || temps.size() % w != 0)
        throw InputError("rmse_windows: series does not divide into whole windows");
    const std::size_t n = desired.size();
    RmseSeries out;
    out.per_zone.assign(n, {});
    for (std::size_t start = 0; start < temps.size(); start += w) {
        double all = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = start; k < start + w; ++k) {
                if (temps[k].size() != n) throw InputError("rmse_windows: zone count mismatch");
                const double d = temps[k][i] - desired[i];
                s += d * d;
            }
            all += s;
            out.per_zone[i].push_back(std::sqrt(s / static_cast<double>(w)));
        }
        out.all_zones.push_back(std::sqrt(all / static_cast<double>(w * n)));
    }
    return out;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

inline MeanStd mean_std(const std::vector<double>& v) {
    if (v.empty()) throw InputError("mean_std: empty series");
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    double q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    return {m, std::sqrt(q / static_cast<double>(v.size()))};
}

struct Summary {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string dataset;  // fingerprint
    std::vector<std::size_t> days;
    std::size_t slots = 0;
    MeanStd power;        // HVAC power per slot, kW
    MeanStd temperature;  // zone-mean temperature per slot, degC
    MeanStd rmse;         // all-zone RMSE per 3-hour window, degC
    double total_cost = 0.0;
    double grid_import_kwh = 0.0;
};

inline Summary summarize(const std::vector<SlotRecord>& recs, const std::vector<double>& desired, double slot_hours) {
    if (recs.empty()) throw InputError("summarize: no slots");
    Summary s;
    std::vector<double> power, temp;
    std::vector<std::vector<double>> temps;
    for (const auto& r : recs) {
        power.push_back(r.p_hvac);
        double t = 0.0;
        for (double z : r.temps) t += z;
        temp.push_back(t / static_cast<double>(r.temps.size()));
        temps.push_back(r.temps);
        s.total_cost += r.cost;
        s.grid_import_kwh += std::max(r.p_grid, 0.0) * slot_hours;
        if (s.days.empty() || s.days.back() != r.day) s.days.push_back(r.day);
    }
    s.slots = recs.size();
    s.power = mean_std(power);
    s.temperature = mean_std(temp);
    s.rmse = mean_std(rmse_windows(temps, desired, slot_hours).all_zones);
    return s;
}

inline std::vector<double> desired_temps(const EnvConfig& env) {
    std::vector<double> d;
    for (const auto& z : env.zones) d.push_back(z.desired_temp_c);
    return d;
}

inline const char* summary_csv_header() {
    return "scenario,seed,slots,power_mean_kw,power_std_kw,temp_mean_c,temp_std_c,rmse_mean_c,rmse_std_c,total_cost,"
           "grid_import_kwh";
}

inline std::string summary_csv_row(const Summary& s) {
    std::ostringstream os;
    os << s.scenario << ',' << s.seed << ',' << s.slots << ',' << fmt_double(s.power.mean) << ','
       << fmt_double(s.power.std) << ',' << fmt_double(s.temperature.mean) << ',' << fmt_double(s.temperature.std)
       << ',' << fmt_double(s.rmse.mean) << ',' << fmt_double(s.rmse.std) << ',' << fmt_double(s.total_cost) << ','
       << fmt_double(s.grid_import_kwh);
    return os.str();
}

/// Doubles are stored as shortest round-trip strings so the file compares
/// exactly against a recomputation.
inline nlohmann::json summary_json(const Summary& s) {
    nlohmann::json j;
    j["scenario"] = s.scenario;
    j["seed"] = s.seed;
    j["dataset"] = s.dataset;
    j["days"] = s.days;
    j["slots"] = s.slots;
    j["power_mean_kw"] = fmt_double(s.power.mean);
    j["power_std_kw"] = fmt_double(s.power.std);
    j["temp_mean_c"] = fmt_double(s.temperature.mean);
    j["temp_std_c"] = fmt_double(s.temperature.std);
    j["rmse_mean_c"] = fmt_double(s.rmse.mean);
    j["rmse_std_c"] = fmt_double(s.rmse.std);
    j["total_cost"] = fmt_double(s.total_cost);
    j["grid_import_kwh"] = fmt_double(s.grid_import_kwh);
    return j;
}

inline Summary summary_from_json(const nlohmann::json& j) {
    auto num = [&](const char* k) {
        const auto v = parse_double(j.at(k).get<std::string>());
        if (!v) throw ParseError(std::string("summary: bad value for ") + k, 0);
        return *v;
    };
    Summary s;
    try {
        s.scenario = j.at("scenario").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.dataset = j.at("dataset").get<std::string>();
        s.days = j.at("days").get<std::vector<std::size_t>>();
        s.slots = j.at("slots").get<std::size_t>();
        s.power = {num("power_mean_kw"), num("power_std_kw")};
        s.temperature = {num("temp_mean_c"), num("temp_std_c")};
        s.rmse = {num("rmse_mean_c"), num("rmse_std_c")};
        s.total_cost = num("total_cost");
        s.grid_import_kwh = num("grid_import_kwh");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("summary: ") + e.what(), 0);
    }
    return s;
}

inline void write_rmse_csv(std::ostream& os, const RmseSeries& r, const std::vector<SlotRecord>& recs,
                           double slot_hours, double window_hours = 3.0) {
    const auto w = static_cast<std::size_t>(std::llround(window_hours / slot_hours));
    os << "day,window_start_h";
    for (std::size_t i = 0; i < r.per_zone.size(); ++i) os << ",zone_" << i + 1;
    os << ",all_zones\n";
    for (std::size_t k = 0; k < r.all_zones.size(); ++k) {
        const auto& first = recs[k * w];
        os << first.day << ',' << fmt_double(static_cast<double>(first.slot) * slot_hours);
        for (const auto& z : r.per_zone) os << ',' << fmt_double(z[k]);
        os << ',' << fmt_double(r.all_zones[k]) << '\n';
    }
}

// --- runs --------------------------------------------------------------------

struct RunResult {
    std::filesystem::path dir;
    Summary summary;
    std::vector<SlotRecord> records;
    std::optional<ddpg::TrainingLog> training;
};

inline std::filesystem::path run_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
    return std::filesystem::path(cfg.output_dir) / (cfg.scenario + "_seed" + std::to_string(seed));
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << text;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Writes config snapshot, slot log, RMSE series and summary for one run.
inline Summary write_run_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg, std::uint64_t seed,
                                 const LoadedData& data, const std::vector<SlotRecord>& recs) {
    std::filesystem::create_directories(dir);
    ExperimentConfig snap = cfg;
    snap.seeds = {seed};
    snap.data.weather = std::filesystem::absolute(cfg.weather_path()).string();
    snap.data.prices = std::filesystem::absolute(cfg.prices_path()).string();
    write_text(dir / "config.json", to_json(snap).dump(2) + "\n");
    {
        std::ostringstream os;
        write_slot_log(os, recs);
        write_text(dir / "slots.csv", os.str());
    }
    const auto desired = desired_temps(cfg.env);
    std::vector<std::vector<double>> temps;
    for (const auto& r : recs) temps.push_back(r.temps);
    {
        std::ostringstream os;
        write_rmse_csv(os, rmse_windows(temps, desired, cfg.env.slot_hours), recs, cfg.env.slot_hours);
        write_text(dir / "rmse.csv", os.str());
    }
    Summary s = summarize(recs, desired, cfg.env.slot_hours);
    s.scenario = cfg.scenario;
    s.seed = seed;
    s.dataset = hex64(data.fingerprint);
    write_text(dir / "summary.csv", std::string(summary_csv_header()) + "\n" + summary_csv_row(s) + "\n");
    write_text(dir / "summary.json", summary_json(s).dump(2) + "\n");
    return s;
}

inline void write_training_log(const std::filesystem::path& dir, const ddpg::TrainingLog& log) {
    std::ostringstream os;
    os << "episode,day,return,noise_scale,updates,mean_critic_loss\n";
    for (std::size_t i = 0; i < log.episodes.size(); ++i) {
        const auto& e = log.episodes[i];
        os << i << ',' << e.day << ',' << fmt_double(e.episode_return) << ',' << fmt_double(e.noise_scale) << ','
           << e.updates << ',' << fmt_double(e.mean_critic_loss) << '\n';
    }
    write_text(dir / "training.csv", os.str());
}

/// Full run for one seed: MPC closed loop, or train then deploy an agent.
inline RunResult run_scenario(const ExperimentConfig& cfg, std::uint64_t seed, bool write = true) {
    cfg.validate();
    const LoadedData data = load_data(cfg);
    RunResult res;
    res.dir = run_dir(cfg, seed);
    std::optional<TrainedAgent> trained;
    if (cfg.scenario == "mpc") {
        res.records = run_mpc(cfg, data.dataset, test_days(cfg));
    } else {
        trained.emplace(train_agent(cfg, data.dataset, seed));
        res.records = run_agent(cfg, data.dataset, trained->agent);
        res.training = trained->log;
    }
    if (write) {
        res.summary = write_run_outputs(res.dir, cfg, seed, data, res.records);
        if (trained) {
            trained->agent.save((res.dir / "checkpoint.txt").string());
            write_training_log(res.dir, trained->log);
        }
    } else {
        res.summary = summarize(res.records, desired_temps(cfg.env), cfg.env.slot_hours);
        res.summary.scenario = cfg.scenario;
        res.summary.seed = seed;
        res.summary.dataset = hex64(data.fingerprint);
    }
    return res;
}

/// Recomputes summary.json of a run directory from its slots.csv and
/// config.json; returns true when the two serialisations are identical.
inline bool summary_matches_log(const std::filesystem::path& dir) {
    const ExperimentConfig cfg = parse_config(read_text(dir / "config.json"));
    std::istringstream is(read_text(dir / "slots.csv"));
    const auto recs = read_slot_log(is);
    const auto stored = nlohmann::json::parse(read_text(dir / "summary.json"));
    Summary s = summarize(recs, desired_temps(cfg.env), cfg.env.slot_hours);
    s.scenario = stored.at("scenario").get<std::string>();
    s.seed = stored.at("seed").get<std::uint64_t>();
    s.dataset = stored.at("dataset").get<std::string>();
    return summary_json(s).dump(2) + "\n" == read_text(dir / "summary.json");
}

// --- comparison --------------------------------------------------------------

struct Comparison {
    std::vector<Summary> rows;
};

/// Loads run summaries and checks that they were evaluated on the same data.
inline Comparison compare_runs(const std::vector<std::filesystem::path>& dirs) {
    if (dirs.size() < 2) throw ConfigError("compare needs at least two run directories");
    Comparison c;
    for (const auto& d : dirs) {
        const auto p = d / "summary.json";
        if (!std::filesystem::exists(p)) throw ConfigError("no summary.json in " + d.string());
        c.rows.push_back(summary_from_json(nlohmann::json::parse(read_text(p))));
    }
    for (const auto& r : c.rows) {
        if (r.dataset != c.rows.front().dataset || r.days != c.rows.front().days)
            throw ConfigError("runs were evaluated on different datasets or days (" + c.rows.front().scenario + " vs " +
                              r.scenario + ")");
    }
    return c;
}

inline std::string comparison_csv(const Comparison& c) {
    std::string out = std::string(summary_csv_header()) + "\n";
    for (const auto& r : c.rows) out += summary_csv_row(r) + "\n";
    return out;
}

inline nlohmann::json comparison_json(const Comparison& c) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : c.rows) j.push_back(summary_json(r));
    return j;
}

}  // namespace hvacgrid
