#pragma once

// Experiment configuration as a JSON tree.
//
// Every object is read strictly: an unknown key is an error, a missing key
// keeps its default. to_json() writes every field, so a snapshot read back
// with from_json() reproduces the run exactly.
//
// Zones are given either as an explicit "zones" array or as "n_zones" copies
// of "zone_defaults". Both may be present when their counts agree.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hvacgrid/ddpg.hpp"
#include "hvacgrid/envs.hpp"
#include "hvacgrid/errors.hpp"
#include "hvacgrid/mpc.hpp"

namespace hvacgrid {

inline constexpr int kSchemaVersion = 1;

struct DataConfig {
    std::string weather = "weather_synthetic.csv";
    std::string prices = "prices_synthetic.csv";
    std::size_t train_days = 20;
    std::size_t test_days = 5;
};

/// Rule-based diesel dispatch for the MPC scenario.
struct DispatchConfig {
    bool diesel_enabled = true;
    double price_threshold = 0.2;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string scenario = "mpc";
    std::vector<std::uint64_t> seeds{1};
    std::size_t epochs = 0;  // 0: 50 for combo, 100 for drl
    std::string output_dir = "runs";
    std::string data_dir;    // resolved against HVACGRID_DATA_DIR when empty
    DataConfig data;
    EnvConfig env;
    MpcParams mpc = integrated_mpc();
    ddpg::DdpgConfig ddpg;
    DispatchConfig dispatch;

    static MpcParams integrated_mpc() {
        MpcParams p;
        p.integrated = true;
        return p;
    }

    std::size_t effective_epochs() const {
        if (epochs > 0) return epochs;
        return scenario == "combo" ? 50 : 100;
    }

    std::string weather_path() const { return resolve(data.weather); }
    std::string prices_path() const { return resolve(data.prices); }

    std::string resolve(const std::string& file) const {
        std::filesystem::path p(file);
        if (p.is_absolute()) return file;
        const std::string dir = data_dir.empty() ? data::data_dir("data") : data_dir;
        return (std::filesystem::path(dir) / p).string();
    }

    void validate(bool check_files = true) const {
        auto fail = [](const std::string& m) { throw ConfigError(m); };
        if (schema_version != kSchemaVersion)
            fail("unsupported schema_version " + std::to_string(schema_version) + " (expected " +
                 std::to_string(kSchemaVersion) + ")");
        if (scenario != "mpc" && scenario != "combo" && scenario != "drl")
            fail("scenario must be one of mpc, combo, drl (got '" + scenario + "')");
        if (seeds.empty()) fail("seeds must not be empty");
        if (data.test_days == 0) fail("data.test_days must be positive");
        if (scenario != "mpc" && data.train_days == 0) fail("data.train_days must be positive for learning scenarios");
        if (dispatch.price_threshold < 0.0) fail("dispatch.price_threshold must be >= 0");
        try {
            env.validate();
            mpc.validate();
            ddpg.validate();
        } catch (const InputError& e) {
            fail(e.what());
        }
        if (mpc.slot_hours != env.slot_hours) fail("mpc.slot_hours must equal env.slot_hours");
        if (check_files) {
            for (const auto& f : {weather_path(), prices_path()})
                if (!std::filesystem::exists(f)) fail("data file not found: " + f);
        }
    }
};

namespace config_detail {

using nlohmann::json;

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + "expected an object");
    }

    template <class T>
    void operator()(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        read(*it, out, path_ + "." + key);
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& at(const char* key) {
        seen_.insert(key);
        return j_.at(key);
    }
    void mark(const char* key) { seen_.insert(key); }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(where() + "unknown key '" + k + "'");
    }

private:
    std::string where() const { return path_.empty() ? "config: " : "config " + path_.substr(1) + ": "; }

    static void read(const json& v, double& out, const std::string& p) {
        if (!v.is_number()) throw ConfigError("config " + p.substr(1) + ": expected a number");
        out = v.get<double>();
    }
    static void read(const json& v, bool& out, const std::string& p) {
        if (!v.is_boolean()) throw ConfigError("config " + p.substr(1) + ": expected true or false");
        out = v.get<bool>();
    }
    static void read(const json& v, int& out, const std::string& p) {
        if (!v.is_number_integer()) throw ConfigError("config " + p.substr(1) + ": expected an integer");
        out = v.get<int>();
    }
    static void read(const json& v, std::size_t& out, const std::string& p) {
        if (!v.is_number_unsigned()) throw ConfigError("config " + p.substr(1) + ": expected a non-negative integer");
        out = v.get<std::size_t>();
    }
    static void read(const json& v, std::string& out, const std::string& p) {
        if (!v.is_string()) throw ConfigError("config " + p.substr(1) + ": expected a string");
        out = v.get<std::string>();
    }
    template <class T>
    static void read(const json& v, std::vector<T>& out, const std::string& p) {
        if (!v.is_array()) throw ConfigError("config " + p.substr(1) + ": expected an array");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            T e{};
            read(v[i], e, p + "[" + std::to_string(i) + "]");
            out.push_back(e);
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

class Writer {
public:
    explicit Writer(json& j) : j_(j) { j_ = json::object(); }
    template <class T>
    void operator()(const char* key, const T& v) {
        j_[key] = v;
    }

private:
    json& j_;
};

template <class V, class Z>
void fields_zone(V& v, Z& z) {
    v("thermal_capacitance", z.thermal_capacitance);
    v("envelope_resistance", z.envelope_resistance);
    v("internal_gain_kw", z.internal_gain_kw);
    v("desired_temp_c", z.desired_temp_c);
    v("criticality", z.criticality);
}

template <class V, class H>
void fields_hvac(V& v, H& h) {
    v("k_fan", h.k_fan);
    v("cop", h.cop);
    v("cp_air", h.cp_air);
    v("supply_temp_c", h.supply_temp_c);
    v("return_temp_c", h.return_temp_c);
    v("mdot_min", h.mdot_min);
    v("mdot_max", h.mdot_max);
    v("substep_hours", h.substep_hours);
}

template <class V, class B>
void fields_battery(V& v, B& b) {
    v("capacity_kwh", b.capacity_kwh);
    v("self_discharge_rate_per_hour", b.self_discharge_rate_per_hour);
    v("eta_charge", b.eta_charge);
    v("eta_discharge", b.eta_discharge);
    v("max_charge_kw", b.max_charge_kw);
    v("max_discharge_kw", b.max_discharge_kw);
    v("safety_factor", b.safety_factor);
}

template <class V, class P>
void fields_pv(V& v, P& p) {
    v("area_m2", p.area_m2);
    v("yield", p.yield);
    v("performance_ratio", p.performance_ratio);
}

template <class V, class D>
void fields_diesel(V& v, D& d) {
    v("tau", d.tau);
    v("max_output_kw", d.max_output_kw);
}

template <class V, class R>
void fields_reward(V& v, R& r) {
    v("penalty_epsilon", r.penalty_epsilon);
    v("kappa_up", r.kappa_up);
    v("kappa_low", r.kappa_low);
    v("wc_min", r.wc_min);
    v("wc_max", r.wc_max);
    v("lambda_comfort", r.lambda_comfort);
    v("sell_ratio", r.sell_ratio);
}

template <class V, class E>
void fields_env_scalars(V& v, E& e) {
    v("p_const_kw", e.p_const_kw);
    v("comfort_low_c", e.comfort_low_c);
    v("comfort_high_c", e.comfort_high_c);
    v("initial_soc_frac", e.initial_soc_frac);
    v("initial_temp_c", e.initial_temp_c);
    v("initial_p_dg_kw", e.initial_p_dg_kw);
    v("slot_hours", e.slot_hours);
    v("slots_per_episode", e.slots_per_episode);
    v("time_sincos", e.time_sincos);
}

template <class V, class M>
void fields_mpc(V& v, M& m) {
    v("w_energy", m.w_energy);
    v("w_comfort", m.w_comfort);
    v("horizon", m.horizon);
    v("slot_hours", m.slot_hours);
    v("iters", m.iters);
    v("step_size", m.step_size);
    v("wc_min", m.wc_min);
    v("wc_max", m.wc_max);
    v("eps_comfort", m.eps_comfort);
    v("fd_step", m.fd_step);
    v("tol", m.tol);
    v("seed_levels", m.seed_levels);
    v("starts", m.starts);
    v("integrated", m.integrated);
}

template <class V, class D>
void fields_ddpg(V& v, D& d) {
    v("hidden", d.hidden);
    v("actor_lr", d.actor_lr);
    v("critic_lr", d.critic_lr);
    v("tau", d.tau);
    v("discount", d.discount);
    v("batch_size", d.batch_size);
    v("buffer_capacity", d.buffer_capacity);
    v("ou_mu", d.ou_mu);
    v("ou_theta", d.ou_theta);
    v("ou_sigma", d.ou_sigma);
    v("ou_dt", d.ou_dt);
    v("explore_start", d.explore_start);
    v("explore_end", d.explore_end);
    v("reward_scale", d.reward_scale);
}

template <class V, class D>
void fields_data(V& v, D& d) {
    v("weather", d.weather);
    v("prices", d.prices);
    v("train_days", d.train_days);
    v("test_days", d.test_days);
}

template <class V, class D>
void fields_dispatch(V& v, D& d) {
    v("diesel_enabled", d.diesel_enabled);
    v("price_threshold", d.price_threshold);
}

template <class Fn, class T>
void read_block(Reader& parent, const char* key, const std::string& path, T& out, Fn fn) {
    parent.mark(key);
    if (!parent.has(key)) return;
    Reader r(parent.at(key), path + "." + key);
    fn(r, out);
    r.finish();
}

template <class Fn, class T>
json write_block(const T& in, Fn fn) {
    json j;
    Writer w(j);
    fn(w, in);
    return j;
}

}  // namespace config_detail

inline ExperimentConfig from_json(const nlohmann::json& j) {
    using namespace config_detail;
    ExperimentConfig c;
    Reader r(j, "");
    r("schema_version", c.schema_version);
    if (!j.contains("schema_version")) throw ConfigError("config: missing schema_version");
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
    r("scenario", c.scenario);
    r("seeds", c.seeds);
    r("epochs", c.epochs);
    r("output_dir", c.output_dir);
    r("data_dir", c.data_dir);
    read_block(r, "data", "", c.data, [](Reader& v, DataConfig& d) { fields_data(v, d); });
    read_block(r, "dispatch", "", c.dispatch, [](Reader& v, DispatchConfig& d) { fields_dispatch(v, d); });
    read_block(r, "mpc", "", c.mpc, [](Reader& v, MpcParams& m) { fields_mpc(v, m); });
    read_block(r, "ddpg", "", c.ddpg, [](Reader& v, ddpg::DdpgConfig& d) { fields_ddpg(v, d); });

    r.mark("env");
    if (j.contains("env")) {
        Reader e(r.at("env"), ".env");
        EnvConfig& env = c.env;
        fields_env_scalars(e, env);
        read_block(e, "hvac", ".env", env.hvac, [](Reader& v, HvacParams& h) { fields_hvac(v, h); });
        read_block(e, "battery", ".env", env.battery, [](Reader& v, Battery& b) { fields_battery(v, b); });
        read_block(e, "pv", ".env", env.pv, [](Reader& v, PvPanel& p) { fields_pv(v, p); });
        read_block(e, "diesel", ".env", env.diesel, [](Reader& v, DieselGen& d) { fields_diesel(v, d); });
        read_block(e, "reward", ".env", env.reward, [](Reader& v, RewardParams& p) { fields_reward(v, p); });
        ZoneParams proto;
        read_block(e, "zone_defaults", ".env", proto, [](Reader& v, ZoneParams& z) { fields_zone(v, z); });
        std::optional<std::size_t> n;
        if (j["env"].contains("n_zones")) {
            std::size_t k = 0;
            e("n_zones", k);
            n = k;
        }
        e.mark("n_zones");
        e.mark("zones");
        if (j["env"].contains("zones")) {
            const auto& arr = j["env"]["zones"];
            if (!arr.is_array()) throw ConfigError("config env.zones: expected an array");
            env.zones.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                ZoneParams z = proto;
                Reader zr(arr[i], ".env.zones[" + std::to_string(i) + "]");
                fields_zone(zr, z);
                zr.finish();
                env.zones.push_back(z);
            }
            if (n && *n != env.zones.size())
                throw ConfigError("config env: n_zones disagrees with the length of env.zones");
        } else {
            env.zones.assign(n.value_or(env.zones.size()), proto);
        }
        e.finish();
    }
    r.finish();
    return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    using namespace config_detail;
    json j;
    j["schema_version"] = c.schema_version;
    j["scenario"] = c.scenario;
    j["seeds"] = c.seeds;
    j["epochs"] = c.epochs;
    j["output_dir"] = c.output_dir;
    j["data_dir"] = c.data_dir;
    j["data"] = write_block(c.data, [](Writer& w, const DataConfig& d) { fields_data(w, d); });
    j["dispatch"] = write_block(c.dispatch, [](Writer& w, const DispatchConfig& d) { fields_dispatch(w, d); });
    j["mpc"] = write_block(c.mpc, [](Writer& w, const MpcParams& m) { fields_mpc(w, m); });
    j["ddpg"] = write_block(c.ddpg, [](Writer& w, const ddpg::DdpgConfig& d) { fields_ddpg(w, d); });
    json env = write_block(c.env, [](Writer& w, const EnvConfig& e) { fields_env_scalars(w, e); });
    env["hvac"] = write_block(c.env.hvac, [](Writer& w, const HvacParams& h) { fields_hvac(w, h); });
    env["battery"] = write_block(c.env.battery, [](Writer& w, const Battery& b) { fields_battery(w, b); });
    env["pv"] = write_block(c.env.pv, [](Writer& w, const PvPanel& p) { fields_pv(w, p); });
    env["diesel"] = write_block(c.env.diesel, [](Writer& w, const DieselGen& d) { fields_diesel(w, d); });
    env["reward"] = write_block(c.env.reward, [](Writer& w, const RewardParams& p) { fields_reward(w, p); });
    env["n_zones"] = c.env.zones.size();
    env["zones"] = json::array();
    for (const auto& z : c.env.zones)
        env["zones"].push_back(write_block(z, [](Writer& w, const ZoneParams& zz) { fields_zone(w, zz); }));
    j["env"] = env;
    return j;
}

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found or unreadable: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Command-line overrides applied on top of a loaded file.
struct Overrides {
    std::optional<std::string> scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<std::string> output_dir;
    std::optional<std::string> weather;
    std::optional<std::string> prices;
    std::optional<std::size_t> test_days;
};

inline void apply_overrides(ExperimentConfig& c, const Overrides& o) {
    if (o.scenario) c.scenario = *o.scenario;
    if (o.seed) c.seeds = {*o.seed};
    if (o.epochs) {
        if (*o.epochs == 0) throw ConfigError("--epochs must be positive");
        c.epochs = *o.epochs;
    }
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.weather) c.data.weather = std::filesystem::absolute(*o.weather).string();
    if (o.prices) c.data.prices = std::filesystem::absolute(*o.prices).string();
    if (o.test_days) c.data.test_days = *o.test_days;
}

}  // namespace hvacgrid
