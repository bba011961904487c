#pragma once

// Economic MPC for zone airflow, optionally co-optimising battery dispatch.
//
// The stage objective trades HVAC energy against comfort:
//
//     J = w_E * E_H + w_c * sum_i CR_i / CF_i
//
// with E_H the fan + chiller energy over the horizon and CF_i the comfort
// factor of zone i's predicted trajectory. In integrated mode the grid bill
// over the horizon is added and battery power becomes a decision variable.
//
// The solver is projected gradient descent on box-normalised decision
// variables with central finite-difference gradients and Armijo
// backtracking, started from the best of a handful of seed plans. Besides
// constant airflows the seeds include plans that land every zone on its
// setpoint in one chosen slot and idle otherwise: the comfort term rewards a
// single on-setpoint slot heavily, so the problem has one basin per slot.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hvacgrid/errors.hpp"
#include "hvacgrid/microgrid.hpp"
#include "hvacgrid/thermal.hpp"

namespace hvacgrid {

struct MpcParams {
    double w_energy = 0.1;
    double w_comfort = 0.9;
    std::size_t horizon = 4;
    double slot_hours = 0.5;
    std::size_t iters = 100;
    double step_size = 0.5;   // initial step in normalised units
    double wc_min = 0.1;
    double wc_max = 0.9;
    double eps_comfort = 0.1;
    double fd_step = 1e-6;    // normalised units
    double tol = 1e-10;
    std::size_t seed_levels = 5;  // constant seed plans tried besides the warm start
    std::size_t starts = 3;       // best seeds refined by descent
    bool integrated = false;

    void validate() const {
        detail::require(horizon >= 1, "mpc: horizon must be >= 1");
        detail::require(slot_hours > 0.0, "mpc: slot_hours must be positive");
        detail::require(iters >= 1, "mpc: iters must be >= 1");
        detail::require(step_size > 0.0, "mpc: step_size must be positive");
        detail::require(wc_min < wc_max, "mpc: need wc_min < wc_max");
        detail::require(w_energy >= 0.0 && w_comfort >= 0.0, "mpc: weights must be >= 0");
        detail::require(eps_comfort > 0.0, "mpc: eps_comfort must be positive");
        detail::require(starts >= 1, "mpc: starts must be >= 1");
    }
};

/// Physical model the controller predicts with.
struct MpcModel {
    std::vector<ZoneParams> zones;
    HvacParams hvac;
    Battery battery;
    PvPanel pv;
    double p_const_kw = 0.0;
    double sell_ratio = 0.3;
};

/// Exogenous inputs over (at least) the horizon.
struct MpcForecast {
    std::vector<double> t_out;
    std::vector<double> irradiance;
    std::vector<double> price;
};

struct MpcPlan {
    std::size_t horizon = 0;
    std::size_t n_zones = 0;
    std::vector<double> mdots;       // horizon x n_zones, row-major
    std::vector<double> p_ess_plan;  // horizon entries in integrated mode, else empty
    double objective_value = 0.0;
    std::size_t iterations = 0;

    double mdot(std::size_t k, std::size_t i) const { return mdots[k * n_zones + i]; }
    std::span<const double> row(std::size_t k) const { return {mdots.data() + k * n_zones, n_zones}; }
};

/// Comfort penalty sum_i CR_i / CF_i over a horizon x n_zones trajectory.
inline double comfort_penalty(std::span<const ZoneParams> zones, std::span<const double> trajs, std::size_t horizon,
                              double eps_comfort) {
    const std::size_t n = zones.size();
    if (trajs.size() != horizon * n) throw InputError("comfort_penalty: trajectory shape mismatch");
    std::vector<double> col(horizon);
    double pen = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < horizon; ++k) col[k] = trajs[k * n + i];
        pen += zones[i].criticality / comfort_factor(col, zones[i].desired_temp_c, eps_comfort);
    }
    return pen;
}

/// HVAC energy (kWh) over the horizon; row k's power uses row k's predicted
/// temperatures for the return-air closure.
inline double hvac_energy(const HvacParams& hvac, std::span<const double> trajs, std::span<const double> mdots,
                          std::size_t horizon, std::size_t n, double slot_hours) {
    double e = 0.0;
    for (std::size_t k = 0; k < horizon; ++k)
        e += hvac_power(hvac, mdots.subspan(k * n, n), trajs.subspan(k * n, n)) * slot_hours;
    return e;
}

/// w_E * E_H + w_c * sum_i CR_i / CF_i for given predicted temperatures and airflows.
inline double objective(const MpcParams& params, std::span<const ZoneParams> zones, const HvacParams& hvac,
                        std::span<const double> predicted_trajs, std::span<const double> mdots) {
    const std::size_t n = zones.size();
    const std::size_t h = params.horizon;
    if (n == 0) throw InputError("objective: no zones");
    if (predicted_trajs.size() != h * n || mdots.size() != h * n)
        throw InputError("objective: matrices must be horizon x n_zones");
    const double e_h = hvac_energy(hvac, predicted_trajs, mdots, h, n, params.slot_hours);
    return params.w_energy * e_h + params.w_comfort * comfort_penalty(zones, predicted_trajs, h, params.eps_comfort);
}

/// Rolls the RC model forward under an airflow plan; returns horizon x n temperatures.
inline std::vector<double> predict_temperatures(const MpcModel& model, std::span<const double> temps0,
                                                std::span<const double> t_out, std::span<const double> mdots,
                                                std::size_t horizon, double slot_hours) {
    const std::size_t n = model.zones.size();
    std::vector<double> out(horizon * n);
    std::vector<double> cur(temps0.begin(), temps0.end());
    for (std::size_t k = 0; k < horizon; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            cur[i] = zone_step(model.zones[i], model.hvac, cur[i], t_out[k], mdots[k * n + i], slot_hours);
            out[k * n + i] = cur[i];
        }
    }
    return out;
}

/// Airflow in [mdot_min, mdot_max] whose slot step ends closest to `target`
/// (zone temperature falls monotonically with airflow).
inline double airflow_to_reach(const ZoneParams& zone, const HvacParams& hvac, double t_zone, double t_out,
                               double target, double dt_hours) {
    double lo = hvac.mdot_min, hi = hvac.mdot_max;
    if (zone_step(zone, hvac, t_zone, t_out, lo, dt_hours) <= target) return lo;
    if (zone_step(zone, hvac, t_zone, t_out, hi, dt_hours) >= target) return hi;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (zone_step(zone, hvac, t_zone, t_out, mid, dt_hours) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

class MpcController {
public:
    MpcController(MpcModel model, MpcParams params) : model_(std::move(model)), params_(params) {
        params_.validate();
        model_.hvac.validate();
        for (const auto& z : model_.zones) z.validate();
        if (model_.zones.empty()) throw InputError("mpc: need at least one zone");
        if (params_.integrated) model_.battery.validate();
    }

    const MpcParams& params() const { return params_; }
    MpcParams& params() { return params_; }
    const MpcModel& model() const { return model_; }
    std::size_t n_zones() const { return model_.zones.size(); }
    std::size_t n_vars() const {
        return params_.horizon * n_zones() + (params_.integrated ? params_.horizon : 0);
    }

    /// Objective of a full plan (airflows plus, in integrated mode, battery
    /// power) from the given initial temperatures and stored energy.
    double evaluate(std::span<const double> temps0, double soc0, double p_dg, const MpcForecast& fc,
                    std::span<const double> mdots, std::span<const double> p_ess) const {
        const std::size_t n = n_zones();
        const std::size_t h = params_.horizon;
        const auto trajs = predict_temperatures(model_, temps0, fc.t_out, mdots, h, params_.slot_hours);
        double j = objective(params_, model_.zones, model_.hvac, trajs, mdots);
        if (params_.integrated) {
            const Battery& b = model_.battery;
            double soc = soc0;
            for (std::size_t k = 0; k < h; ++k) {
                const double p_h = hvac_power(model_.hvac, mdots.subspan(k * n, n),
                                              std::span<const double>(trajs).subspan(k * n, n));
                const double p_real =
                    feasible_ess_power(b, soc, p_ess[k], params_.slot_hours, b.soc_low(), b.soc_high());
                soc = battery_step(b, soc, p_real, params_.slot_hours).soc;
                const double p_net = p_h + model_.p_const_kw - pv_power(model_.pv, fc.irradiance[k]);
                const double p_grid = grid_exchange(p_net, p_real, p_dg);
                j += slot_cost(p_grid, fc.price[k], model_.sell_ratio, params_.slot_hours);
            }
        }
        return j;
    }

    /// Solves the horizon problem. `warm` seeds the search when given.
    MpcPlan solve(std::span<const double> temps0, double soc0, double p_dg, const MpcForecast& fc,
                  const MpcPlan* warm = nullptr) const {
        const std::size_t n = n_zones();
        const std::size_t h = params_.horizon;
        if (temps0.size() != n) throw InputError("mpc solve: temperature vector does not match zone count");
        if (fc.t_out.size() < h || (params_.integrated && (fc.irradiance.size() < h || fc.price.size() < h)))
            throw InputError("mpc solve: forecast shorter than horizon");

        const std::size_t nv = n_vars();
        std::vector<double> lo(nv), hi(nv);
        for (std::size_t v = 0; v < h * n; ++v) {
            lo[v] = model_.hvac.mdot_min;
            hi[v] = model_.hvac.mdot_max;
        }
        for (std::size_t v = h * n; v < nv; ++v) {
            lo[v] = -model_.battery.max_discharge_kw;
            hi[v] = model_.battery.max_charge_kw;
        }

        std::vector<double> x(nv);
        auto eval_unit = [&](std::span<const double> u) {
            for (std::size_t v = 0; v < nv; ++v) x[v] = lo[v] + u[v] * (hi[v] - lo[v]);
            return evaluate(temps0, soc0, p_dg, fc, std::span<const double>(x).first(h * n),
                            std::span<const double>(x).subspan(h * n));
        };

        // seed plans
        std::vector<std::vector<double>> seeds;
        if (warm && warm->mdots.size() == h * n && (!params_.integrated || warm->p_ess_plan.size() == h)) {
            std::vector<double> u(nv);
            for (std::size_t v = 0; v < h * n; ++v) u[v] = (warm->mdots[v] - lo[v]) / (hi[v] - lo[v]);
            for (std::size_t v = h * n; v < nv; ++v)
                u[v] = (warm->p_ess_plan[v - h * n] - lo[v]) / (hi[v] - lo[v]);
            for (double& e : u) e = std::clamp(e, 0.0, 1.0);
            seeds.push_back(std::move(u));
        }
        const double idle_ess = params_.integrated ? -lo[nv - 1] / (hi[nv - 1] - lo[nv - 1]) : 0.0;
        const std::size_t levels = std::max<std::size_t>(params_.seed_levels, 1);
        for (std::size_t l = 0; l < levels; ++l) {
            const double a = levels == 1 ? 0.5 : static_cast<double>(l) / static_cast<double>(levels - 1);
            std::vector<double> u(nv, a);
            for (std::size_t v = h * n; v < nv; ++v) u[v] = idle_ess;
            seeds.push_back(std::move(u));
        }
        // setpoint-landing plans: zones reach the edge of the comfort clamp
        // in slot `target` after a constant pre-landing airflow level and
        // idle afterwards; target == h tracks the clamp edge in every slot
        auto landing = [&](std::size_t target, double level) {
            std::vector<double> u(nv, 0.0);
            std::vector<double> cur(temps0.begin(), temps0.end());
            for (std::size_t k = 0; k < h; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& z = model_.zones[i];
                    const auto& hv = model_.hvac;
                    double m = hv.mdot_min;
                    if (target == h || target == k)
                        m = airflow_to_reach(z, hv, cur[i], fc.t_out[k], z.desired_temp_c + 0.999 * params_.eps_comfort,
                                             params_.slot_hours);
                    else if (k < target)
                        m = hv.mdot_min + level * (hv.mdot_max - hv.mdot_min);
                    cur[i] = zone_step(z, hv, cur[i], fc.t_out[k], m, params_.slot_hours);
                    u[k * n + i] = (m - lo[k * n + i]) / (hi[k * n + i] - lo[k * n + i]);
                }
            }
            for (std::size_t v = h * n; v < nv; ++v) u[v] = idle_ess;
            return u;
        };
        // fixed airflow in the landing slot (full or none) with the per-zone
        // pre-landing level that ends exactly on the clamp edge
        auto solved_landing = [&](std::size_t target, double land_m) {
            const auto& hv = model_.hvac;
            std::vector<double> u(nv, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& z = model_.zones[i];
                const double edge = z.desired_temp_c + 0.999 * params_.eps_comfort;
                auto land_temp = [&](double level) {
                    double t = temps0[i];
                    for (std::size_t k = 0; k < target; ++k)
                        t = zone_step(z, hv, t, fc.t_out[k], level, params_.slot_hours);
                    return zone_step(z, hv, t, fc.t_out[target], land_m, params_.slot_hours);
                };
                double a = hv.mdot_min, b = hv.mdot_max;
                if (land_temp(a) <= edge) {
                    b = a;
                } else if (land_temp(b) >= edge) {
                    a = b;
                } else {
                    for (int it = 0; it < 50; ++it) {
                        const double mid = 0.5 * (a + b);
                        (land_temp(mid) > edge ? a : b) = mid;
                    }
                }
                const double level = 0.5 * (a + b);
                for (std::size_t k = 0; k < h; ++k) {
                    const double m = k < target ? level : (k == target ? land_m : hv.mdot_min);
                    u[k * n + i] = (m - lo[k * n + i]) / (hi[k * n + i] - lo[k * n + i]);
                }
            }
            for (std::size_t v = h * n; v < nv; ++v) u[v] = idle_ess;
            return u;
        };
        seeds.push_back(landing(h, 0.0));
        for (std::size_t target = 1; target < h; ++target) {
            seeds.push_back(solved_landing(target, model_.hvac.mdot_max));
            seeds.push_back(solved_landing(target, model_.hvac.mdot_min));
        }
        for (std::size_t target = 0; target < h; ++target) {
            const std::size_t pre = target == 0 ? 1 : levels;
            for (std::size_t l = 0; l < pre; ++l)
                seeds.push_back(landing(target, pre == 1 ? 0.0 : static_cast<double>(l) / static_cast<double>(pre - 1)));
        }

        std::vector<std::size_t> order(seeds.size());
        for (std::size_t s = 0; s < seeds.size(); ++s) order[s] = s;
        std::vector<double> seed_f(seeds.size());
        for (std::size_t s = 0; s < seeds.size(); ++s) seed_f[s] = eval_unit(seeds[s]);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return seed_f[a] < seed_f[b]; });

        // descend from the best few seeds; keep the lowest result
        std::vector<double> u;
        double f = std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        const std::size_t starts = std::min<std::size_t>(std::max<std::size_t>(params_.starts, 1), seeds.size());
        for (std::size_t r = 0; r < starts; ++r) {
            std::vector<double> cand = seeds[order[r]];
            double fc_val = seed_f[order[r]];
            const std::size_t it = descend(cand, fc_val, eval_unit);
            if (r == 0) used = it;
            if (fc_val < f) {
                f = fc_val;
                u = std::move(cand);
            }
        }

        MpcPlan plan;
        plan.horizon = h;
        plan.n_zones = n;
        plan.mdots.resize(h * n);
        for (std::size_t v = 0; v < h * n; ++v) plan.mdots[v] = std::clamp(lo[v] + u[v] * (hi[v] - lo[v]), lo[v], hi[v]);
        if (params_.integrated) {
            // report the battery power the safe band actually admits; the
            // objective already priced these values
            const Battery& b = model_.battery;
            plan.p_ess_plan.resize(h);
            double soc = soc0;
            for (std::size_t v = h * n; v < nv; ++v) {
                const double req = std::clamp(lo[v] + u[v] * (hi[v] - lo[v]), lo[v], hi[v]);
                const double p = feasible_ess_power(b, soc, req, params_.slot_hours, b.soc_low(), b.soc_high());
                plan.p_ess_plan[v - h * n] = p;
                soc = battery_step(b, soc, p, params_.slot_hours).soc;
            }
        }
        plan.objective_value = evaluate(temps0, soc0, p_dg, fc, plan.mdots, plan.p_ess_plan);
        plan.iterations = used;
        return plan;
    }

    struct Actuation {
        std::vector<double> mdots;
        double p_ess = 0.0;
    };

    /// Receding-horizon step: solve from the shifted previous plan and return
    /// its first row.
    Actuation receding_step(std::span<const double> temps0, double soc0, double p_dg, const MpcForecast& fc) {
        MpcPlan plan = solve(temps0, soc0, p_dg, fc, last_.has_value() ? &*last_ : nullptr);
        Actuation act;
        act.mdots.assign(plan.row(0).begin(), plan.row(0).end());
        if (params_.integrated) act.p_ess = plan.p_ess_plan.front();
        last_plan_ = plan;
        last_ = shifted(plan);
        return act;
    }

    /// Previous plan moved one slot forward with its last row repeated.
    static MpcPlan shifted(const MpcPlan& plan) {
        MpcPlan s = plan;
        const std::size_t n = plan.n_zones;
        for (std::size_t k = 0; k + 1 < plan.horizon; ++k)
            std::copy_n(plan.mdots.begin() + (k + 1) * n, n, s.mdots.begin() + k * n);
        for (std::size_t k = 0; k + 1 < plan.p_ess_plan.size(); ++k) s.p_ess_plan[k] = plan.p_ess_plan[k + 1];
        return s;
    }

    const std::optional<MpcPlan>& last_plan() const { return last_plan_; }
    void reset() {
        last_.reset();
        last_plan_.reset();
    }

private:
    template <class Eval>
    std::size_t descend(std::vector<double>& u, double& f, Eval& eval_unit) const {
        const std::size_t nv = u.size();
        std::vector<double> g(nv), trial(nv), probe;
        double step = params_.step_size;
        std::size_t it = 0;
        for (; it < params_.iters; ++it) {
            probe = u;
            for (std::size_t v = 0; v < nv; ++v) {
                const double up = std::min(u[v] + params_.fd_step, 1.0);
                const double dn = std::max(u[v] - params_.fd_step, 0.0);
                probe[v] = up;
                const double fu = eval_unit(probe);
                probe[v] = dn;
                const double fd = eval_unit(probe);
                probe[v] = u[v];
                g[v] = (fu - fd) / (up - dn);
            }
            bool accepted = false;
            double f_trial = f;
            for (int bt = 0; bt < 40; ++bt) {
                double decrease = 0.0;
                for (std::size_t v = 0; v < nv; ++v) {
                    trial[v] = std::clamp(u[v] - step * g[v], 0.0, 1.0);
                    decrease += g[v] * (u[v] - trial[v]);
                }
                if (decrease <= 0.0) break;  // projected gradient vanished
                f_trial = eval_unit(trial);
                if (f_trial <= f - 1e-4 * decrease) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
            const double gain = f - f_trial;
            u = trial;
            f = f_trial;
            step = std::min(step * 2.0, 4.0 * params_.step_size);
            if (gain <= params_.tol * (1.0 + std::abs(f))) {
                ++it;
                break;
            }
        }
        return it;
    }

    MpcModel model_;
    MpcParams params_;
    std::optional<MpcPlan> last_;
    std::optional<MpcPlan> last_plan_;
};

}  // namespace hvacgrid
