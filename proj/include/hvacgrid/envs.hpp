#pragma once

// Building + microgrid plant shared by all three controllers, and the two
// learning environments wrapped around it:
//
//   ComboEnv  the agent sets battery power and the MPC weights (w_E, w_c);
//             an HVAC-only MPC turns the weights into airflow.
//   PureEnv   the agent sets battery power and every zone's airflow.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hvacgrid/data.hpp"
#include "hvacgrid/ddpg.hpp"
#include "hvacgrid/errors.hpp"
#include "hvacgrid/microgrid.hpp"
#include "hvacgrid/mpc.hpp"
#include "hvacgrid/thermal.hpp"

namespace hvacgrid {

struct RewardParams {
    double penalty_epsilon = 0.5;
    double kappa_up = 0.5;
    double kappa_low = 0.5;
    double wc_min = 0.1;
    double wc_max = 0.9;
    double lambda_comfort = 0.15;
    double sell_ratio = 0.3;

    void validate() const {
        auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        detail::require(unit(penalty_epsilon) && unit(kappa_up) && unit(kappa_low) && unit(lambda_comfort) &&
                            unit(sell_ratio) && unit(wc_min) && unit(wc_max),
                        "reward: parameters must lie in [0,1]");
        detail::require(wc_min < wc_max, "reward: need wc_min < wc_max");
    }
};

struct EnvConfig {
    std::vector<ZoneParams> zones = std::vector<ZoneParams>(7);
    HvacParams hvac;
    Battery battery;
    PvPanel pv;
    DieselGen diesel;
    double p_const_kw = 0.5;
    double comfort_low_c = 23.0;
    double comfort_high_c = 27.0;
    double initial_soc_frac = 0.5;
    double initial_temp_c = 26.0;
    double initial_p_dg_kw = 0.0;
    double slot_hours = 0.5;
    std::size_t slots_per_episode = data::kSlotsPerDay;
    bool time_sincos = false;
    RewardParams reward;

    void validate() const {
        detail::require(!zones.empty(), "env: need at least one zone");
        for (const auto& z : zones) z.validate();
        hvac.validate();
        battery.validate();
        pv.validate();
        diesel.validate();
        reward.validate();
        detail::require(p_const_kw >= 0.0, "env: constant load must be >= 0");
        detail::require(comfort_low_c < comfort_high_c, "env: comfort band is empty");
        detail::require(initial_soc_frac >= 0.0 && initial_soc_frac <= 1.0, "env: initial SOC fraction outside [0,1]");
        detail::require(slot_hours > 0.0, "env: slot_hours must be positive");
        detail::require(slots_per_episode > 0, "env: slots_per_episode must be positive");
    }
};

/// Exogenous inputs on the slot grid.
struct Dataset {
    std::vector<double> t_out;
    std::vector<double> irradiance;
    std::vector<double> price;

    std::size_t slots() const { return t_out.size(); }
    std::size_t days() const { return data::full_days(slots()); }

    static Dataset from_series(const data::WeatherSeries& w, const data::PriceSeries& p) {
        Dataset d;
        const std::size_t n = std::min(w.size(), p.size());
        d.t_out.assign(w.t_out_c.begin(), w.t_out_c.begin() + static_cast<std::ptrdiff_t>(n));
        d.irradiance.assign(w.irradiance_kw_m2.begin(), w.irradiance_kw_m2.begin() + static_cast<std::ptrdiff_t>(n));
        d.price.assign(p.buy_price.begin(), p.buy_price.begin() + static_cast<std::ptrdiff_t>(n));
        return d;
    }

    /// Window of `len` slots from g, padded with the final value past the end.
    MpcForecast forecast(std::size_t g, std::size_t len) const {
        MpcForecast f;
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t i = std::min(g + k, slots() - 1);
            f.t_out.push_back(t_out[i]);
            f.irradiance.push_back(irradiance[i]);
            f.price.push_back(price[i]);
        }
        return f;
    }
};

// --- reward and state helpers ------------------------------------------------

inline double net_demand(double p_hvac, double p_const, double p_solar) { return p_hvac + p_const - p_solar; }

/// Battery band penalty: -(SOC u + eps P_max) below the safe band,
/// -(SOC u + (1-eps) P_max) above it, zero inside (band edges count as inside).
inline double battery_band_reward(const Battery& batt, double soc, double sell_price, double eps) {
    if (soc < batt.soc_low()) return -(soc * sell_price + eps * batt.capacity_kwh);
    if (soc > batt.soc_high()) return -(soc * sell_price + (1.0 - eps) * batt.capacity_kwh);
    return 0.0;
}

/// -P_net u plus a linear penalty when w_c leaves [wc_min, wc_max].
inline double net_demand_reward(double p_net, double sell_price, double w_c, const RewardParams& p) {
    if (w_c > p.wc_max) return -(p_net * sell_price + p.kappa_up * (w_c - p.wc_max));
    if (w_c < p.wc_min) return -(p_net * sell_price + p.kappa_low * (p.wc_min - w_c));
    return -(p_net * sell_price);
}

/// Supervisory (combo) reward r = r_b + r_net with u = sigma v.
inline double combo_reward(const Battery& batt, double soc, double p_net, double buy_price, double w_c_raw,
                           const RewardParams& p) {
    const double u = p.sell_ratio * buy_price;
    return battery_band_reward(batt, soc, u, p.penalty_epsilon) + net_demand_reward(p_net, u, w_c_raw, p);
}

/// r = -power_cost - lambda * t_delta
inline double pure_reward(double power_cost, double t_delta, double lambda) {
    if (t_delta < 0.0) throw InputError("pure_reward: t_delta must be >= 0");
    return -power_cost - lambda * t_delta;
}

/// Mean distance of zone temperatures from [low, high]; zero inside.
inline double comfort_distance(std::span<const double> temps, double low, double high) {
    if (temps.empty()) return 0.0;
    double s = 0.0;
    for (double t : temps) s += std::max({0.0, low - t, t - high});
    return s / static_cast<double>(temps.size());
}

/// Temperature vector as seen from room i (1-based): rotated right by i-1,
/// so room 1 sees [T1 .. Tn] and room 2 sees [Tn, T1, .., Tn-1].
inline std::vector<double> rotate_for_room(std::span<const double> temps, std::size_t room) {
    const std::size_t n = temps.size();
    if (room < 1 || room > n) throw InputError("rotate_for_room: room index out of range");
    std::vector<double> out(n);
    const std::size_t shift = room - 1;
    for (std::size_t k = 0; k < n; ++k) out[k] = temps[(k + n - shift) % n];
    return out;
}

/// Zone index (0-based) that position k of room i's view refers to.
inline std::size_t rotated_zone(std::size_t k, std::size_t room, std::size_t n) { return (k + n - (room - 1)) % n; }

/// CR-weighted mean zone temperature.
inline double weighted_indoor_temp(std::span<const ZoneParams> zones, std::span<const double> temps) {
    double w = 0.0, s = 0.0;
    for (std::size_t i = 0; i < zones.size(); ++i) {
        w += zones[i].criticality;
        s += zones[i].criticality * temps[i];
    }
    return s / w;
}

// --- plant -------------------------------------------------------------------

/// Everything observed in one simulated slot.
struct SlotRecord {
    std::size_t day = 0;
    std::size_t slot = 0;
    std::vector<double> temps;  // end of slot
    std::vector<double> mdots;
    double t_out = 0.0;
    double irradiance = 0.0;
    double price = 0.0;
    double p_hvac = 0.0;
    double p_solar = 0.0;
    double p_const = 0.0;
    double p_ess = 0.0;
    double p_dg = 0.0;
    double p_grid = 0.0;
    double soc = 0.0;  // end of slot
    double cost = 0.0;
    double reward = 0.0;
    double w_energy = 0.0;
    double w_comfort = 0.0;
    double residual = 0.0;
};

/// Physical building + microgrid stepped one slot at a time. Every slot is
/// checked for power balance, SOC range and actuator bounds.
class Plant {
public:
    Plant(EnvConfig cfg, std::shared_ptr<const Dataset> data) : cfg_(std::move(cfg)), data_(std::move(data)) {
        cfg_.validate();
        if (!data_ || data_->days() == 0) throw InputError("plant: dataset holds no complete day");
    }

    const EnvConfig& config() const { return cfg_; }
    const Dataset& dataset() const { return *data_; }
    std::size_t n_zones() const { return cfg_.zones.size(); }

    void reset(std::size_t day) {
        if (day >= data_->days()) throw InputError("plant: day " + std::to_string(day) + " not in dataset");
        day_ = day;
        slot_ = 0;
        temps_.assign(cfg_.zones.size(), cfg_.initial_temp_c);
        soc_ = cfg_.initial_soc_frac * cfg_.battery.capacity_kwh;
        p_dg_ = cfg_.initial_p_dg_kw;
        ready_ = true;
    }

    bool ready() const { return ready_; }
    std::size_t day() const { return day_; }
    std::size_t slot() const { return slot_; }
    std::size_t global_slot() const { return day_ * data::kSlotsPerDay + slot_; }
    const std::vector<double>& temps() const { return temps_; }
    double soc() const { return soc_; }
    double p_dg() const { return p_dg_; }
    double t_out() const { return data_->t_out[std::min(global_slot(), data_->slots() - 1)]; }
    double irradiance() const { return data_->irradiance[std::min(global_slot(), data_->slots() - 1)]; }
    double price() const { return data_->price[std::min(global_slot(), data_->slots() - 1)]; }

    std::vector<double> clip_mdots(std::span<const double> mdots) const {
        std::vector<double> out(mdots.begin(), mdots.end());
        for (double& m : out) m = std::clamp(m, cfg_.hvac.mdot_min, cfg_.hvac.mdot_max);
        return out;
    }

    /// Applies airflow, requested battery power and a diesel command for one slot.
    SlotRecord apply(std::span<const double> mdots_req, double p_ess_req, double u_dg = 0.0) {
        if (!ready_) throw StateError("plant: reset() has not been called");
        if (mdots_req.size() != n_zones()) throw InputError("plant: airflow vector does not match zone count");
        const double dt = cfg_.slot_hours;
        SlotRecord r;
        r.day = day_;
        r.slot = slot_;
        r.t_out = t_out();
        r.irradiance = irradiance();
        r.price = price();
        r.mdots = clip_mdots(mdots_req);
        const auto b = building_step(cfg_.zones, cfg_.hvac, temps_, r.t_out, r.mdots, dt);
        r.temps = b.temps;
        r.p_hvac = b.p_hvac;
        r.p_solar = pv_power(cfg_.pv, r.irradiance);
        r.p_const = cfg_.p_const_kw;
        const double p_net = net_demand(r.p_hvac, r.p_const, r.p_solar);

        const Battery& batt = cfg_.battery;
        r.p_ess = feasible_ess_power(batt, soc_, p_ess_req, dt, 0.0, batt.capacity_kwh);
        const auto bs = battery_step(batt, soc_, r.p_ess, dt);
        r.soc = bs.soc;
        r.p_dg = p_dg_;
        r.p_grid = grid_exchange(p_net, r.p_ess, r.p_dg);
        r.cost = slot_cost(r.p_grid, r.price, cfg_.reward.sell_ratio, dt);
        r.residual = power_balance_residual(r.p_grid, r.p_solar, r.p_dg, r.p_ess, r.p_const, r.p_hvac);

        check(r);
        temps_ = r.temps;
        soc_ = r.soc;
        p_dg_ = diesel_step(cfg_.diesel, p_dg_, std::clamp(u_dg, 0.0, cfg_.diesel.max_output_kw));
        ++slot_;
        return r;
    }

private:
    void check(const SlotRecord& r) const {
        if (!(std::abs(r.residual) < 1e-9))
            throw InvariantViolation("power balance residual " + std::to_string(r.residual) + " kW at day " +
                                     std::to_string(r.day) + " slot " + std::to_string(r.slot));
        if (!(r.soc >= 0.0 && r.soc <= cfg_.battery.capacity_kwh))
            throw InvariantViolation("SOC left [0, capacity]");
        for (double m : r.mdots)
            if (!(m >= cfg_.hvac.mdot_min && m <= cfg_.hvac.mdot_max)) throw InvariantViolation("airflow out of bounds");
        if (!(r.p_ess >= -cfg_.battery.max_discharge_kw && r.p_ess <= cfg_.battery.max_charge_kw))
            throw InvariantViolation("battery power out of bounds");
        for (double t : r.temps)
            if (!std::isfinite(t)) throw InvariantViolation("non-finite zone temperature");
    }

    EnvConfig cfg_;
    std::shared_ptr<const Dataset> data_;
    std::size_t day_ = 0;
    std::size_t slot_ = 0;
    std::vector<double> temps_;
    double soc_ = 0.0;
    double p_dg_ = 0.0;
    bool ready_ = false;
};

inline MpcModel mpc_model_from(const EnvConfig& cfg) {
    MpcModel m;
    m.zones = cfg.zones;
    m.hvac = cfg.hvac;
    m.battery = cfg.battery;
    m.pv = cfg.pv;
    m.p_const_kw = cfg.p_const_kw;
    m.sell_ratio = cfg.reward.sell_ratio;
    return m;
}

inline double time_of_day(std::size_t slot, double slot_hours) {
    const double h = std::fmod(static_cast<double>(slot) * slot_hours, 24.0);
    return h / 24.0;
}

/// Shared plumbing for the learning environments: day subset, episode length
/// and an optional per-slot record sink.
class PlantEnv : public ddpg::Environment {
public:
    PlantEnv(EnvConfig cfg, std::shared_ptr<const Dataset> data, std::vector<std::size_t> days)
        : plant_(std::move(cfg), std::move(data)), days_(std::move(days)) {
        if (days_.empty())
            for (std::size_t d = 0; d < plant_.dataset().days(); ++d) days_.push_back(d);
        for (std::size_t d : days_)
            if (d >= plant_.dataset().days()) throw InputError("env: day " + std::to_string(d) + " not in dataset");
    }

    std::size_t num_days() const override { return days_.size(); }
    const std::vector<std::size_t>& days() const { return days_; }
    const Plant& plant() const { return plant_; }
    std::size_t slots_per_episode() const { return plant_.config().slots_per_episode; }

    void set_recorder(std::vector<SlotRecord>* sink) { sink_ = sink; }

protected:
    void reset_plant(std::size_t day_index) {
        if (day_index >= days_.size()) throw InputError("env: day index " + std::to_string(day_index) + " out of range");
        plant_.reset(days_[day_index]);
    }
    void record(const SlotRecord& r) {
        if (sink_) sink_->push_back(r);
    }

    Plant plant_;
    std::vector<std::size_t> days_;
    std::vector<SlotRecord>* sink_ = nullptr;
};

/// State [SOC, P_net, v_t, T_in, T_out, w_c, time-of-day (or sin, cos)];
/// action [P_ess, w_E raw, w_c raw].
class ComboEnv : public PlantEnv {
public:
    ComboEnv(EnvConfig cfg, std::shared_ptr<const Dataset> data, std::vector<std::size_t> days, MpcParams mpc)
        : PlantEnv(cfg, std::move(data), std::move(days)), mpc_(mpc_model_from(cfg), hvac_only(mpc)) {}

    std::size_t state_dim() const override { return plant_.config().time_sincos ? 8 : 7; }
    std::size_t action_dim() const override { return 3; }
    std::vector<double> action_low() const override { return {-plant_.config().battery.max_discharge_kw, 0.0, 0.0}; }
    std::vector<double> action_high() const override { return {plant_.config().battery.max_charge_kw, 1.0, 1.0}; }
    std::vector<double> state_center() const override {
        const auto& c = plant_.config();
        std::vector<double> v{0.5 * c.battery.capacity_kwh, 2.0, 0.15, 26.0, 30.0, 0.5, 0.5};
        if (c.time_sincos) v.back() = 0.0, v.push_back(0.0);
        return v;
    }
    std::vector<double> state_scale() const override {
        const auto& c = plant_.config();
        std::vector<double> v{0.5 * c.battery.capacity_kwh, 2.0, 0.1, 3.0, 5.0, 0.5, 0.5};
        if (c.time_sincos) v.back() = 1.0, v.push_back(1.0);
        return v;
    }

    std::vector<double> reset(std::size_t day_index) override {
        reset_plant(day_index);
        mpc_.reset();
        w_c_ = 0.5;
        p_net_ = plant_.config().p_const_kw - pv_power(plant_.config().pv, plant_.irradiance());
        return state();
    }

    ddpg::StepResult step(std::span<const double> action) override {
        if (!plant_.ready()) throw StateError("combo env: reset() has not been called");
        if (action.size() != 3) throw InputError("combo env: action must have 3 components");
        const auto& c = plant_.config();
        const double p_ess = std::clamp(action[0], -c.battery.max_discharge_kw, c.battery.max_charge_kw);
        const double w_c_raw = action[2];
        auto& mp = mpc_.params();
        mp.w_energy = decode_weight(action[1]);
        mp.w_comfort = decode_weight(w_c_raw);
        const auto fc = plant_.dataset().forecast(plant_.global_slot(), mp.horizon);
        const auto act = mpc_.receding_step(plant_.temps(), plant_.soc(), plant_.p_dg(), fc);
        SlotRecord r = plant_.apply(act.mdots, p_ess, 0.0);
        p_net_ = net_demand(r.p_hvac, r.p_const, r.p_solar);
        w_c_ = mp.w_comfort;
        r.w_energy = mp.w_energy;
        r.w_comfort = mp.w_comfort;
        r.reward = combo_reward(c.battery, r.soc, p_net_, r.price, w_c_raw, c.reward);
        record(r);
        return {state(), r.reward};
    }

    /// Raw tuning output clipped into the open unit interval.
    static double decode_weight(double raw) { return std::clamp(raw, 1e-3, 1.0 - 1e-3); }

    std::vector<double> state() const {
        const auto& c = plant_.config();
        std::vector<double> s{plant_.soc(), p_net_, plant_.price(), weighted_indoor_temp(c.zones, plant_.temps()),
                              plant_.t_out(), w_c_};
        const double tod = time_of_day(plant_.slot(), c.slot_hours);
        if (c.time_sincos) {
            s.push_back(std::sin(2.0 * std::numbers::pi * tod));
            s.push_back(std::cos(2.0 * std::numbers::pi * tod));
        } else {
            s.push_back(tod);
        }
        return s;
    }

    const MpcController& controller() const { return mpc_; }

private:
    static MpcParams hvac_only(MpcParams p) {
        p.integrated = false;
        return p;
    }

    MpcController mpc_;
    double w_c_ = 0.5;
    double p_net_ = 0.0;
};

/// State [SOC, v_t, T_all (room view), T_delta, T_out]; action
/// [P_ess, mdot in room-view order].
class PureEnv : public PlantEnv {
public:
    PureEnv(EnvConfig cfg, std::shared_ptr<const Dataset> data, std::vector<std::size_t> days)
        : PlantEnv(std::move(cfg), std::move(data), std::move(days)) {}

    std::size_t state_dim() const override { return 4 + plant_.n_zones(); }
    std::size_t action_dim() const override { return 1 + plant_.n_zones(); }
    std::vector<double> action_low() const override {
        std::vector<double> v(action_dim(), plant_.config().hvac.mdot_min);
        v[0] = -plant_.config().battery.max_discharge_kw;
        return v;
    }
    std::vector<double> action_high() const override {
        std::vector<double> v(action_dim(), plant_.config().hvac.mdot_max);
        v[0] = plant_.config().battery.max_charge_kw;
        return v;
    }
    std::vector<double> state_center() const override {
        std::vector<double> v{0.5 * plant_.config().battery.capacity_kwh, 0.15};
        for (std::size_t i = 0; i < plant_.n_zones(); ++i) v.push_back(26.0);
        v.push_back(1.0);
        v.push_back(30.0);
        return v;
    }
    std::vector<double> state_scale() const override {
        std::vector<double> v{0.5 * plant_.config().battery.capacity_kwh, 0.1};
        for (std::size_t i = 0; i < plant_.n_zones(); ++i) v.push_back(3.0);
        v.push_back(1.0);
        v.push_back(5.0);
        return v;
    }

    std::size_t current_room() const { return plant_.slot() % plant_.n_zones() + 1; }

    std::vector<double> reset(std::size_t day_index) override {
        reset_plant(day_index);
        return state();
    }

    std::vector<double> state() const { return assemble(current_room()); }

    /// State as seen from room i (1-based).
    std::vector<double> assemble(std::size_t room) const {
        const auto& c = plant_.config();
        std::vector<double> s{plant_.soc(), plant_.price()};
        const auto view = rotate_for_room(plant_.temps(), room);
        s.insert(s.end(), view.begin(), view.end());
        s.push_back(comfort_distance(plant_.temps(), c.comfort_low_c, c.comfort_high_c));
        s.push_back(plant_.t_out());
        return s;
    }

    /// Clips every component of an action into its box.
    std::vector<double> clip(std::span<const double> a) const {
        const auto lo = action_low();
        const auto hi = action_high();
        std::vector<double> out(a.begin(), a.end());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
        return out;
    }

    ddpg::StepResult step(std::span<const double> action) override {
        if (!plant_.ready()) throw StateError("pure env: reset() has not been called");
        if (action.size() != action_dim()) throw InputError("pure env: action dimension mismatch");
        const auto a = clip(action);
        const std::size_t n = plant_.n_zones();
        const std::size_t room = current_room();
        std::vector<double> mdots(n);
        for (std::size_t k = 0; k < n; ++k) mdots[rotated_zone(k, room, n)] = a[1 + k];
        SlotRecord r = plant_.apply(mdots, a[0], 0.0);
        const auto& c = plant_.config();
        const double t_delta = comfort_distance(r.temps, c.comfort_low_c, c.comfort_high_c);
        r.reward = pure_reward(r.cost, t_delta, c.reward.lambda_comfort);
        record(r);
        return {state(), r.reward};
    }
};

}  // namespace hvacgrid
