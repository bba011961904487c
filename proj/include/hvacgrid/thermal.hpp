#pragma once

// Per-zone first-order RC thermal model and HVAC electrical power.
//
// Each zone is a single thermal capacitance C (kWh/degC) behind an envelope
// resistance R (degC/kW) to outdoor air, with a constant internal gain q (kW)
// and chilled supply air at T_c. Heat flows are in kW and time in hours, so
// dT/dt [degC/h] = ((T_out - T)/R + c_p mdot (T_c - T) + q) / C, where
// c_p [kJ/(kg degC)] * mdot [kg/s] is already in kW/degC.
// Zones are uncoupled.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hvacgrid/errors.hpp"

namespace hvacgrid {

struct ZoneParams {
    double thermal_capacitance = 0.5;   // kWh/degC
    double envelope_resistance = 10.0;  // degC/kW
    double internal_gain_kw = 0.1;
    double desired_temp_c = 25.0;
    double criticality = 0.5;

    void validate() const {
        detail::require(thermal_capacitance > 0.0, "zone: capacitance must be positive");
        detail::require(envelope_resistance > 0.0, "zone: resistance must be positive");
        detail::require(internal_gain_kw >= 0.0, "zone: internal gain must be >= 0");
        detail::require(criticality > 0.0 && criticality < 1.0, "zone: criticality must be in (0,1)");
        detail::require(std::isfinite(desired_temp_c), "zone: desired temperature must be finite");
    }
};

struct HvacParams {
    double k_fan = 0.5;            // kW / (kg/s)^2
    double cop = 3.0;
    double cp_air = 1.005;         // kJ/(kg degC), i.e. kW per (kg/s degC)
    double supply_temp_c = 15.0;   // T_c, chiller outlet
    double return_temp_c = 25.0;   // T_s fallback when there is no airflow
    double mdot_min = 0.0;         // kg/s per zone
    double mdot_max = 0.3;
    double substep_hours = 1.0 / 60.0;

    void validate() const {
        detail::require(k_fan > 0.0 && cop > 0.0 && cp_air > 0.0, "hvac: k_fan, cop, cp must be positive");
        detail::require(mdot_min >= 0.0 && mdot_min < mdot_max, "hvac: need 0 <= mdot_min < mdot_max");
        detail::require(supply_temp_c < return_temp_c, "hvac: supply temperature must be below return");
        detail::require(substep_hours > 0.0, "hvac: substep must be positive");
    }
};

struct BuildingState {
    std::vector<double> zone_temps_c;
    std::size_t n_zones() const { return zone_temps_c.size(); }
};

inline void check_mdot(const HvacParams& hvac, double mdot) {
    // tolerate representation error from projections onto the bounds
    constexpr double slack = 1e-12;
    if (!(mdot >= hvac.mdot_min - slack && mdot <= hvac.mdot_max + slack))
        throw InputError("airflow " + std::to_string(mdot) + " outside [" + std::to_string(hvac.mdot_min) + ", " +
                         std::to_string(hvac.mdot_max) + "]");
}

/// Temperature derivative in degC/h.
inline double zone_derivative(const ZoneParams& zone, const HvacParams& hvac, double t_zone, double t_out,
                              double mdot) {
    const double envelope = (t_out - t_zone) / zone.envelope_resistance;
    const double supply = hvac.cp_air * mdot * (hvac.supply_temp_c - t_zone);
    return (envelope + supply + zone.internal_gain_kw) / zone.thermal_capacitance;
}

/// Advances one zone by dt_hours with forward Euler at hvac.substep_hours
/// (the last substep is shortened to land exactly on dt).
inline double zone_step(const ZoneParams& zone, const HvacParams& hvac, double t_zone, double t_out, double mdot,
                        double dt_hours) {
    check_mdot(hvac, mdot);
    if (!(dt_hours >= 0.0)) throw InputError("zone_step: dt must be >= 0");
    // The derivative is affine in T, so n full Euler substeps collapse to
    // T* + g^n (T0 - T*) with g = 1 + h*a and fixed point T*.
    const double h = hvac.substep_hours;
    double n = std::floor(dt_hours / h + 1e-9);
    double rem = dt_hours - n * h;
    if (rem < 1e-15) rem = 0.0;
    const double a = -(1.0 / zone.envelope_resistance + hvac.cp_air * mdot) / zone.thermal_capacitance;
    const double c =
        (t_out / zone.envelope_resistance + hvac.cp_air * mdot * hvac.supply_temp_c + zone.internal_gain_kw) /
        zone.thermal_capacitance;
    const double fixed = -c / a;
    double t = fixed + std::pow(1.0 + h * a, n) * (t_zone - fixed);
    if (rem > 0.0) t += rem * zone_derivative(zone, hvac, t, t_out, mdot);
    return t;
}

/// P_f = k_f * mdot^2
inline double fan_power(const HvacParams& hvac, double mdot_total) {
    if (mdot_total < 0.0) throw InputError("fan_power: negative airflow");
    return hvac.k_fan * mdot_total * mdot_total;
}

/// P_c = (c_p / cop) * mdot * (T_s - T_c); a return stream colder than the
/// supply needs no chilling.
inline double chiller_power(const HvacParams& hvac, double mdot_total, double return_temp_c) {
    if (mdot_total < 0.0) throw InputError("chiller_power: negative airflow");
    return hvac.cp_air / hvac.cop * mdot_total * std::max(0.0, return_temp_c - hvac.supply_temp_c);
}

inline double chiller_power(const HvacParams& hvac, double mdot_total) {
    return chiller_power(hvac, mdot_total, hvac.return_temp_c);
}

/// Airflow-weighted mean zone temperature; the configured return temperature
/// when nothing flows.
inline double return_air_temp(const HvacParams& hvac, std::span<const double> mdots,
                              std::span<const double> zone_temps) {
    if (mdots.size() != zone_temps.size()) throw InputError("return_air_temp: size mismatch");
    double flow = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < mdots.size(); ++i) {
        flow += mdots[i];
        weighted += mdots[i] * zone_temps[i];
    }
    return flow > 0.0 ? weighted / flow : hvac.return_temp_c;
}

/// Total HVAC electrical power with the configured return temperature.
inline double hvac_power(const HvacParams& hvac, std::span<const double> mdots) {
    double total = 0.0;
    for (double m : mdots) {
        check_mdot(hvac, m);
        total += m;
    }
    return fan_power(hvac, total) + chiller_power(hvac, total);
}

/// Total HVAC electrical power with the return temperature closed from the zones.
inline double hvac_power(const HvacParams& hvac, std::span<const double> mdots, std::span<const double> zone_temps) {
    double total = 0.0;
    for (double m : mdots) {
        check_mdot(hvac, m);
        total += m;
    }
    return fan_power(hvac, total) + chiller_power(hvac, total, return_air_temp(hvac, mdots, zone_temps));
}

/// Sum over the trajectory of 1 / max(|T_desired - T_j|, eps).
inline double comfort_factor(std::span<const double> traj, double desired, double eps_comfort = 0.1) {
    if (traj.empty()) throw InputError("comfort_factor: empty trajectory");
    if (!(eps_comfort > 0.0)) throw InputError("comfort_factor: eps must be positive");
    double cf = 0.0;
    for (double t : traj) cf += 1.0 / std::max(std::abs(desired - t), eps_comfort);
    return cf;
}

/// One slot for the whole building. The return-air closure uses the zone
/// temperatures at the end of the slot, the same convention the MPC
/// prediction uses.
struct BuildingStepResult {
    std::vector<double> temps;
    double p_hvac = 0.0;
};

inline BuildingStepResult building_step(std::span<const ZoneParams> zones, const HvacParams& hvac,
                                        std::span<const double> temps, double t_out, std::span<const double> mdots,
                                        double dt_hours) {
    if (zones.size() != temps.size() || zones.size() != mdots.size())
        throw InputError("building_step: zone count mismatch");
    BuildingStepResult out;
    out.temps.resize(zones.size());
    for (std::size_t i = 0; i < zones.size(); ++i)
        out.temps[i] = zone_step(zones[i], hvac, temps[i], t_out, mdots[i], dt_hours);
    out.p_hvac = hvac_power(hvac, mdots, out.temps);
    return out;
}

}  // namespace hvacgrid
