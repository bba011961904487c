#pragma once

// Microgrid component models: PV array, battery storage, diesel generator,
// the bus power balance and the utility tariff.
//
// Units: power in kW, energy (and SOC) in kWh, time in hours. A positive
// grid exchange means import from the utility.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hvacgrid/errors.hpp"

namespace hvacgrid {

struct PvPanel {
    double area_m2 = 20.0;
    double yield = 0.18;
    double performance_ratio = 0.75;

    void validate() const {
        detail::require(area_m2 > 0.0, "pv: area must be positive");
        detail::require(yield > 0.0 && yield <= 1.0, "pv: yield must be in (0,1]");
        detail::require(performance_ratio > 0.0 && performance_ratio <= 1.0,
                        "pv: performance ratio must be in (0,1]");
    }
};

struct Battery {
    double capacity_kwh = 4.0;
    double self_discharge_rate_per_hour = 0.001;
    double eta_charge = 0.95;
    double eta_discharge = 0.95;
    double max_charge_kw = 0.9;
    double max_discharge_kw = 0.9;
    double safety_factor = 0.05;

    double soc_low() const { return safety_factor * capacity_kwh; }
    double soc_high() const { return (1.0 - safety_factor) * capacity_kwh; }

    void validate() const {
        detail::require(capacity_kwh > 0.0, "battery: capacity must be positive");
        detail::require(self_discharge_rate_per_hour >= 0.0, "battery: self-discharge must be >= 0");
        detail::require(eta_charge > 0.0 && eta_charge <= 1.0, "battery: eta_charge must be in (0,1]");
        detail::require(eta_discharge > 0.0 && eta_discharge <= 1.0,
                        "battery: eta_discharge must be in (0,1]");
        detail::require(max_charge_kw > 0.0 && max_discharge_kw > 0.0,
                        "battery: power limits must be positive");
        detail::require(safety_factor > 0.0 && safety_factor < 0.5,
                        "battery: safety factor must be in (0,0.5)");
    }
};

struct DieselGen {
    double tau = 2.0;  // slots
    double max_output_kw = 3.0;

    void validate() const {
        detail::require(tau > 0.0, "diesel: tau must be positive");
        detail::require(max_output_kw > 0.0, "diesel: max output must be positive");
    }
};

struct MicrogridState {
    double soc = 0.0;     // kWh
    double p_dg = 0.0;    // kW
    double p_solar = 0.0; // kW
    double p_grid = 0.0;  // kW, + import
};

struct Tariff {
    std::vector<double> buy_price;  // currency/kWh per slot
    double sell_ratio = 0.3;

    double buy(std::size_t t) const {
        if (t >= buy_price.size())
            throw InputError("tariff: slot " + std::to_string(t) + " outside price series of length " +
                             std::to_string(buy_price.size()));
        return buy_price[t];
    }
    double sell(std::size_t t) const { return sell_ratio * buy(t); }

    void validate() const {
        detail::require(sell_ratio > 0.0 && sell_ratio <= 1.0, "tariff: sell ratio must be in (0,1]");
        for (double v : buy_price) detail::require(v >= 0.0 && std::isfinite(v), "tariff: negative price");
    }
};

/// PV output, P = A * y * r * R, with irradiance r in kW/m^2.
inline double pv_power(const PvPanel& panel, double irradiance_kw_m2) {
    if (!(irradiance_kw_m2 >= 0.0)) throw InputError("pv_power: irradiance must be >= 0");
    return panel.area_m2 * panel.yield * irradiance_kw_m2 * panel.performance_ratio;
}

struct BatteryStepResult {
    double soc = 0.0;
    bool saturated = false;
};

/// Advances the stored energy by one interval.
///
/// p_ess < 0 discharges (the bus receives |p_ess|), p_ess >= 0 charges. The
/// discharge branch draws |p_ess| dt / eta_dis from storage; the charge branch
/// stores eta_ch p_ess dt, so a charge/discharge round trip always loses
/// energy when eta_ch * eta_dis < 1. Self-discharge scales the held energy by
/// (1 - delta dt). The result is clamped to [0, capacity] and the clamp is
/// reported through `saturated`.
inline BatteryStepResult battery_step(const Battery& batt, double soc, double p_ess, double dt_hours) {
    if (p_ess < -batt.max_discharge_kw || p_ess > batt.max_charge_kw)
        throw InputError("battery_step: p_ess outside [-d_max, c_max]");
    if (!(dt_hours > 0.0)) throw InputError("battery_step: dt must be positive");

    double next = (1.0 - batt.self_discharge_rate_per_hour * dt_hours) * soc;
    if (p_ess < 0.0)
        next -= (-p_ess) * dt_hours / batt.eta_discharge;
    else
        next += p_ess * dt_hours * batt.eta_charge;

    BatteryStepResult out{next, false};
    if (next < 0.0) {
        out.soc = 0.0;
        out.saturated = true;
    } else if (next > batt.capacity_kwh) {
        out.soc = batt.capacity_kwh;
        out.saturated = true;
    }
    return out;
}

/// Clips a requested battery power so that battery_step lands inside
/// [lo_kwh, hi_kwh] (self-discharge included). When self-discharge alone
/// would fall below lo_kwh the power is raised to the charge that restores
/// it, within the charge limit; a state above hi_kwh may not charge.
inline double feasible_ess_power(const Battery& batt, double soc, double p_ess, double dt_hours,
                                 double lo_kwh, double hi_kwh) {
    p_ess = std::clamp(p_ess, -batt.max_discharge_kw, batt.max_charge_kw);
    const double held = (1.0 - batt.self_discharge_rate_per_hour * dt_hours) * soc;
    const double room = std::max(0.0, hi_kwh - held);
    const double max_ch = room / (batt.eta_charge * dt_hours);
    if (held < lo_kwh) {
        const double need = std::min((lo_kwh - held) / (batt.eta_charge * dt_hours), batt.max_charge_kw);
        return std::clamp(p_ess, need, std::max(need, std::min(max_ch, batt.max_charge_kw)));
    }
    if (p_ess < 0.0) {
        const double avail = std::max(0.0, held - lo_kwh);
        const double max_dis = avail * batt.eta_discharge / dt_hours;
        return -std::min(-p_ess, max_dis);
    }
    return std::min(p_ess, max_ch);
}

/// Diesel output recurrence P' = -P/tau + u/tau, clamped to [0, max_output].
/// Iterating with a constant command settles at u / (tau + 1).
inline double diesel_step(const DieselGen& dg, double p_dg, double u_dg) {
    if (u_dg < 0.0) throw InputError("diesel_step: negative command");
    if (u_dg > dg.max_output_kw) throw InputError("diesel_step: command above max output");
    const double next = -p_dg / dg.tau + u_dg / dg.tau;
    return std::clamp(next, 0.0, dg.max_output_kw);
}

/// Utility exchange that closes the bus balance
/// P_grid + P_solar + P_dg - P_ess = P_const + P_hvac, with p_net = P_hvac + P_const - P_solar.
inline double grid_exchange(double p_net, double p_ess, double p_dg) { return p_net + p_ess - p_dg; }

/// Residual of the bus balance; zero up to rounding for any slot produced by grid_exchange.
inline double power_balance_residual(double p_grid, double p_solar, double p_dg, double p_ess,
                                     double p_const, double p_hvac) {
    return p_grid + p_solar + p_dg - p_ess - p_const - p_hvac;
}

/// Buy at v_t, sell at sigma v_t.
inline double slot_cost(double p_grid, const Tariff& tariff, std::size_t t, double dt_hours) {
    const double v = tariff.buy(t);
    return v * std::max(p_grid, 0.0) * dt_hours - tariff.sell_ratio * v * std::max(-p_grid, 0.0) * dt_hours;
}

inline double slot_cost(double p_grid, double buy_price, double sell_ratio, double dt_hours) {
    return buy_price * std::max(p_grid, 0.0) * dt_hours -
           sell_ratio * buy_price * std::max(-p_grid, 0.0) * dt_hours;
}

inline bool soc_in_safe_band(const Battery& batt, double soc) {
    return batt.soc_low() <= soc && soc <= batt.soc_high();
}

}  // namespace hvacgrid
