// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hvacgrid/harness.hpp"

using namespace hvacgrid;
namespace fs = std::filesystem;
using nn::Matrix;
using nn::Vector;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

ExperimentConfig bundled_config(const char* name) {
    auto c = load_config(std::string(HVACGRID_SOURCE_DIR) + "/configs/" + name);
    c.data_dir = std::string(HVACGRID_SOURCE_DIR) + "/data";
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- 1: gradient oracle ------------------------------------------------------

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

double max_gradient_error(const nn::MlpSpec& spec, std::mt19937_64& rng) {
    nn::Mlp net(spec);
    net.init(rng);
    std::uniform_real_distribution<double> u(0.5, 1.5), v(-0.3, 0.3);
    auto& p = net.mutable_params();
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += v(rng);
    auto& b = net.mutable_buffers();
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = b[i] == 0.0 ? v(rng) : u(rng);

    const auto in = static_cast<Eigen::Index>(spec.input);
    const auto out = static_cast<Eigen::Index>(spec.output);
    const Matrix x = random_matrix(4, in, rng);
    const Matrix w = random_matrix(4, out, rng);
    auto loss = [&](const Matrix& xx, nn::Mode m) { return (net.forward(xx, m).array() * w.array()).sum(); };
    auto rel = [](double a, double c) { return std::abs(a - c) / std::max({std::abs(a), std::abs(c), 1e-6}); };
    const double h = 1e-5;
    double worst = 0.0;
    for (nn::Mode mode : {nn::Mode::Train, nn::Mode::Eval}) {
        nn::ForwardCache cache;
        net.forward(x, mode, &cache);
        const auto g = net.backward(cache, w);
        for (Eigen::Index i = 0; i < net.params().size(); ++i) {
            const double orig = net.params()[i];
            net.mutable_params()[i] = orig + h;
            const double up = loss(x, mode);
            net.mutable_params()[i] = orig - h;
            const double dn = loss(x, mode);
            net.mutable_params()[i] = orig;
            worst = std::max(worst, rel(g.params[i], (up - dn) / (2.0 * h)));
        }
        Matrix xp = x;
        for (Eigen::Index r = 0; r < x.rows(); ++r)
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                xp(r, c) = x(r, c) + h;
                const double up = loss(xp, mode);
                xp(r, c) = x(r, c) - h;
                const double dn = loss(xp, mode);
                xp(r, c) = x(r, c);
                worst = std::max(worst, rel(g.input(r, c), (up - dn) / (2.0 * h)));
            }
    }
    return worst;
}

Outcome gradient_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = bundled_config("default.json");
    const auto data = load_data(cfg);
    std::vector<std::pair<std::string, nn::MlpSpec>> shapes;
    for (const char* scenario : {"drl", "combo"}) {
        cfg.scenario = scenario;
        const auto env = make_env(cfg, data.dataset, {0});
        nn::MlpSpec actor;
        actor.input = env->state_dim();
        actor.hidden = {32, 32};
        actor.output = env->action_dim();
        actor.out_lo = env->action_low();
        actor.out_hi = env->action_high();
        nn::MlpSpec critic;
        critic.input = env->state_dim() + env->action_dim();
        critic.hidden = {32, 32};
        critic.output = 1;
        shapes.push_back({std::string(scenario) + " actor", actor});
        shapes.push_back({std::string(scenario) + " critic", critic});
    }
    std::mt19937_64 rng(1);
    double worst = 0.0;
    std::string dims;
    for (const auto& [name, spec] : shapes) {
        for (int rep = 0; rep < 10; ++rep) worst = std::max(worst, max_gradient_error(spec, rng));
        dims += " " + name + " in=" + std::to_string(spec.input);
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-4 && secs < 30.0,
            "max rel err " + fmt(worst, 3) + " over 10 nets x" + dims + ", " + fmt(secs, 3) + " s"};
}

// --- 2: MPC oracle -----------------------------------------------------------

Outcome mpc_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> c(0.2, 1.0), r(5.0, 20.0), q(0.0, 0.3), t_init(22.0, 31.0),
        tout(20.0, 36.0), w(0.05, 0.95), cr(0.1, 0.9);
    double worst = 0.0;
    int passed = 0;
    for (int rep = 0; rep < 50; ++rep) {
        MpcParams p;
        p.horizon = 2;
        p.w_energy = w(rng);
        p.w_comfort = w(rng);
        MpcModel model;
        model.zones = {ZoneParams{c(rng), r(rng), q(rng), 25.0, cr(rng)}};
        const MpcController ctl(model, p);
        const double t_out = tout(rng);
        const MpcForecast fc{{t_out, t_out}, {0.3, 0.3}, {0.15, 0.15}};
        const std::vector<double> temps{t_init(rng)};
        const auto& h = model.hvac;
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a <= 20; ++a)
            for (int b = 0; b <= 20; ++b) {
                const std::vector<double> m{h.mdot_min + (h.mdot_max - h.mdot_min) * a / 20.0,
                                            h.mdot_min + (h.mdot_max - h.mdot_min) * b / 20.0};
                best = std::min(best, ctl.evaluate(temps, 0.0, 0.0, fc, m, {}));
            }
        const double got = ctl.solve(temps, 0.0, 0.0, fc).objective_value;
        const double ratio = best > 0.0 ? got / best : (got <= best ? 1.0 : std::numeric_limits<double>::infinity());
        worst = std::max(worst, ratio);
        if (got <= 1.01 * best) ++passed;
    }
    const double secs = seconds_since(t0);
    return {passed == 50 && secs < 60.0, std::to_string(passed) + "/50 instances within 1.01x, worst ratio " +
                                             fmt(worst, 6) + ", " + fmt(secs, 3) + " s"};
}

// --- 3: hand-worked equations ------------------------------------------------

Outcome hand_equations() {
    std::vector<std::pair<std::string, std::pair<double, double>>> checks;
    auto add = [&](const std::string& name, double got, double want) { checks.push_back({name, {got, want}}); };

    add("pv", pv_power(PvPanel{10.0, 0.15, 0.75}, 0.8), 0.9);
    Battery unit;
    unit.capacity_kwh = 1.0;
    unit.self_discharge_rate_per_hour = 0.0;
    unit.eta_charge = 1.0;
    unit.eta_discharge = 0.9;
    unit.max_charge_kw = 1.0;
    unit.max_discharge_kw = 1.0;
    add("battery discharge", battery_step(unit, 0.5, -0.09, 1.0).soc, 0.4);
    unit.eta_discharge = 1.0;
    unit.self_discharge_rate_per_hour = 0.01;
    add("battery self-discharge", battery_step(unit, 0.5, 0.0, 1.0).soc, 0.495);
    add("diesel", diesel_step(DieselGen{2.0, 3.0}, 1.0, 1.0), 0.0);
    add("grid", grid_exchange(2.0, -1.0, 0.5), 0.5);
    add("import cost", slot_cost(2.0, Tariff{{5.0}, 0.3}, 0, 0.5), 5.0);
    add("export cost", slot_cost(-2.0, Tariff{{5.0}, 0.3}, 0, 0.5), -1.5);

    HvacParams wide;
    wide.return_temp_c = 30.0;
    wide.mdot_max = 2.0;
    add("fan", fan_power(wide, 2.0), 2.0);
    add("chiller", chiller_power(wide, 1.0), 5.025);
    add("hvac", hvac_power(wide, std::vector<double>{1.0, 1.0}), 12.05);
    add("comfort factor", comfort_factor(std::vector<double>{27.0}, 25.0), 0.5);
    add("comfort factor at setpoint", comfort_factor(std::vector<double>{25.0, 25.0, 25.0}, 25.0, 0.1), 30.0);

    MpcParams mp;
    mp.horizon = 1;
    mp.w_energy = 0.4;
    mp.w_comfort = 0.6;
    const std::vector<ZoneParams> one_zone{ZoneParams{0.5, 10.0, 0.1, 25.0, 0.5}};
    add("mpc objective",
        objective(mp, one_zone, HvacParams{}, std::vector<double>{27.0},
                  std::vector<double>{0.2}),
        0.4 * 0.412 + 0.6 * 1.0);

    Battery b1;
    b1.capacity_kwh = 1.0;
    b1.safety_factor = 0.05;
    RewardParams rp;
    rp.penalty_epsilon = 0.5;
    rp.kappa_up = 0.5;
    rp.sell_ratio = 1.0;
    add("combo reward below band", combo_reward(b1, 0.02, 0.0, 1.0, 0.5, rp), -0.52);
    add("combo reward weight above range", combo_reward(b1, 0.5, 2.0, 1.0, rp.wc_max + 0.1, rp), -2.05);
    add("pure reward", pure_reward(1.5, 2.0, 0.15), -1.8);

    EnvConfig ec;
    ec.zones = {ZoneParams{0.5, 10.0, 0.1, 25.0, 0.5}};
    ec.hvac.substep_hours = 0.5;
    ec.battery.capacity_kwh = 10.0;
    ec.pv = PvPanel{10.0, 0.15, 0.75};
    ec.p_const_kw = 0.5;
    ec.comfort_low_c = 23.0;
    ec.comfort_high_c = 25.0;
    ec.initial_temp_c = 28.0;
    auto flat = std::make_shared<Dataset>();
    flat->t_out.assign(data::kSlotsPerDay, 30.0);
    flat->irradiance.assign(data::kSlotsPerDay, 0.4);
    flat->price.assign(data::kSlotsPerDay, 0.2);
    Plant plant(ec, flat);
    plant.reset(0);
    const SlotRecord rec = plant.apply(std::vector<double>{0.2}, 0.4);
    add("plant zone temperature", rec.temps[0], 25.687);
    add("plant hvac power", rec.p_hvac, 0.736029);
    add("plant cost", rec.cost, 1.186029 * 0.1);
    PureEnv env(ec, flat, {});
    env.reset(0);
    add("pure env reward", env.step(std::vector<double>{0.4, 0.2}).reward, -0.1186029 - 0.15 * 0.687);

    nn::MlpSpec tiny;
    tiny.input = 1;
    tiny.hidden = {1};
    tiny.output = 1;
    tiny.batch_norm = false;
    nn::Mlp online(tiny), target(tiny);
    online.mutable_params().setConstant(2.0);
    target.mutable_params().setZero();
    nn::soft_update(target, online, 0.5);
    double soft = 0.0;
    for (Eigen::Index i = 0; i < target.params().size(); ++i) soft = std::max(soft, std::abs(target.params()[i] - 1.0));
    add("soft update", 1.0 + soft, 1.0);

    ddpg::DdpgConfig dc;
    dc.hidden = {8, 8};
    dc.batch_size = 2;
    dc.buffer_capacity = 8;
    ddpg::DdpgAgent agent(dc, 2, {-1.0}, {1.0}, 3);
    auto& tp = agent.target_critic().mutable_params();
    tp.setZero();
    tp[tp.size() - 1] = 0.5;
    agent.remember({{0.1, 0.2}, {0.0}, 1.0, {0.3, 0.4}});
    agent.remember({{-0.5, 0.6}, {0.5}, 3.0, {0.1, 0.1}});
    const Vector y = agent.bellman_targets(agent.make_batch(std::vector<std::size_t>{0, 1}));
    add("bellman target 1", y[0], 1.0 + 0.99 * 0.5);
    add("bellman target 2", y[1], 3.0 + 0.99 * 0.5);

    add("rmse window", rmse_windows({{1}, {1}, {1}, {1}, {2}, {2}}, {0.0}, 0.5).all_zones.at(0), std::sqrt(2.0));

    double worst = 0.0;
    std::string bad;
    for (const auto& [name, gw] : checks) {
        const double err = std::abs(gw.first - gw.second);
        if (!(err <= 1e-9)) bad += " " + name;
        worst = std::max(worst, std::isfinite(err) ? err : std::numeric_limits<double>::infinity());
    }
    return {bad.empty(), std::to_string(checks.size()) + " examples, max abs err " + fmt(worst, 3) +
                             (bad.empty() ? "" : ", failing:" + bad)};
}

// --- 4: physical invariants --------------------------------------------------

Outcome physical_invariants() {
    const auto cfg = bundled_config("default.json");
    const auto data = load_data(cfg);
    std::vector<std::size_t> days;
    for (std::size_t d = 0; d < 20; ++d) days.push_back(d);
    const auto recs = run_mpc(cfg, data.dataset, days);
    double worst_balance = 0.0;
    std::size_t soc_bad = 0, action_bad = 0;
    const auto& bat = cfg.env.battery;
    for (const auto& r : recs) {
        worst_balance = std::max(worst_balance, std::abs(power_balance_residual(r.p_grid, r.p_solar, r.p_dg, r.p_ess,
                                                                                r.p_const, r.p_hvac)));
        if (!(r.soc >= 0.0 && r.soc <= bat.capacity_kwh)) ++soc_bad;
        bool ok = r.p_ess >= -bat.max_discharge_kw && r.p_ess <= bat.max_charge_kw;
        for (double m : r.mdots) ok = ok && m >= cfg.env.hvac.mdot_min && m <= cfg.env.hvac.mdot_max;
        ok = ok && r.p_dg >= 0.0 && r.p_dg <= cfg.env.diesel.max_output_kw;
        if (!ok) ++action_bad;
    }
    return {recs.size() == 20 * 48 && worst_balance < 1e-9 && soc_bad == 0 && action_bad == 0,
            std::to_string(recs.size()) + " slots, max balance residual " + fmt(worst_balance, 3) +
                ", SOC violations " + std::to_string(soc_bad) + ", action violations " + std::to_string(action_bad)};
}

// --- 5: determinism ----------------------------------------------------------

std::string slot_log_text(const std::vector<SlotRecord>& recs) {
    std::ostringstream os;
    write_slot_log(os, recs);
    return os.str();
}

Outcome determinism() {
    std::string detail;
    bool all = true;
    for (const char* scenario : {"mpc", "drl", "combo"}) {
        auto cfg = bundled_config(std::string(scenario) == "mpc" ? "default.json" : "toy.json");
        cfg.scenario = scenario;
        cfg.epochs = 3;
        cfg.data.train_days = 3;
        cfg.data.test_days = 2;
        const auto a = slot_log_text(run_scenario(cfg, 11, false).records);
        const auto b = slot_log_text(run_scenario(cfg, 11, false).records);
        const bool same = a == b;
        all = all && same;
        detail += std::string(detail.empty() ? "" : ", ") + scenario + (same ? " identical" : " DIFFERS");
    }
    return {all, detail};
}

// --- 6: learning progress ----------------------------------------------------

Outcome learning_progress() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = bundled_config("toy.json");
    const auto data = load_data(cfg);
    const std::uint64_t seed = cfg.seeds.front();
    const auto trained = train_agent(cfg, data.dataset, seed);
    const auto returns = trained.log.returns();
    double final10 = 0.0;
    for (std::size_t i = returns.size() - 10; i < returns.size(); ++i) final10 += returns[i];
    final10 /= 10.0;
    auto env = make_env(cfg, data.dataset, train_days(cfg));
    const double baseline = random_policy_return(*env, cfg.env.slots_per_episode, 5, seed + 1);
    const double gain = (final10 - baseline) / std::abs(baseline);
    const double secs = seconds_since(t0);
    return {returns.size() == 100 && gain >= 0.2 && secs < 600.0,
            "final-10 mean return " + fmt(final10) + " vs random " + fmt(baseline) + " (" + fmt(100.0 * gain, 3) +
                "% better), " + std::to_string(returns.size()) + " episodes, " + fmt(secs, 3) + " s"};
}

// --- 7: qualitative ordering -------------------------------------------------

Outcome qualitative_ordering() {
    auto cfg = bundled_config("default.json");
    std::string detail;
    int seeds_ok = 0;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    cfg.scenario = "mpc";
    const auto mpc = run_scenario(cfg, seeds.front(), false).summary;
    for (std::uint64_t seed : seeds) {
        cfg.scenario = "drl";
        const auto drl = run_scenario(cfg, seed, false).summary;
        cfg.scenario = "combo";
        const auto combo = run_scenario(cfg, seed, false).summary;
        // scenario 1 = MPC, 2 = combo, 3 = pure DRL
        const double p1 = mpc.power.mean, p2 = combo.power.mean, p3 = drl.power.mean;
        const bool a = std::abs(p3 - p1) <= 0.15 * p1 && p1 < p2 && p3 < p2;
        const bool b = drl.temperature.std <= mpc.temperature.std;
        if (a && b) ++seeds_ok;
        std::cout << "  seed " << seed << ": " << (a && b ? "PASS" : "FAIL") << "  mean power mpc " << fmt(p1)
                  << " combo " << fmt(p2) << " drl " << fmt(p3) << " kW (a " << (a ? "ok" : "no")
                  << "); temp std mpc " << fmt(mpc.temperature.std) << " drl " << fmt(drl.temperature.std)
                  << " C (b " << (b ? "ok" : "no") << ")" << std::endl;
    }
    return {seeds_ok >= 2, std::to_string(seeds_ok) + "/3 seeds pass"};
}

// --- 8: metrics fidelity -----------------------------------------------------

Outcome metrics_fidelity() {
    auto cfg = bundled_config("default.json");
    cfg.data.test_days = 3;
    const fs::path out = fs::temp_directory_path() / ("hvacgrid_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(out);
    cfg.output_dir = out.string();
    const auto res = run_scenario(cfg, 1, true);
    std::vector<std::vector<double>> temps;
    for (const auto& r : res.records) temps.push_back(r.temps);
    const auto rmse = rmse_windows(temps, desired_temps(cfg.env), cfg.env.slot_hours);
    bool spacing = true;
    for (std::size_t k = 0; k < rmse.all_zones.size(); ++k) {
        const auto& first = res.records[k * 6];
        spacing = spacing && first.slot == (k % 8) * 6;
    }
    const bool matches = summary_matches_log(res.dir);
    fs::remove_all(out);
    const bool count = rmse.all_zones.size() == 8 * cfg.data.test_days;
    return {count && spacing && matches, std::to_string(rmse.all_zones.size()) + " RMSE points over " +
                                             std::to_string(cfg.data.test_days) + " days at 3 h spacing, summary " +
                                             (matches ? "reproduced exactly" : "MISMATCH")};
}

// --- 9: OU statistics --------------------------------------------------------

Outcome ou_statistics() {
    const double theta = 0.15, sigma = 0.2, dt = 0.1;
    ddpg::OuNoise n(1, 0.0, theta, sigma, 1.0);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 10000; ++i) ddpg::ou_sample(n, dt, rng);
    double sum = 0.0, sq = 0.0;
    const int steps = 1000000;
    for (int i = 0; i < steps; ++i) {
        const double v = ddpg::ou_sample(n, dt, rng)[0];
        sum += v;
        sq += v * v;
    }
    const double mean = sum / steps;
    const double var = sq / steps - mean * mean;
    const double expected = sigma * sigma / (2.0 * theta);
    const double rel = std::abs(var - expected) / expected;
    return {rel < 0.05, "variance " + fmt(var, 6) + " vs " + fmt(expected, 6) + " (" + fmt(100.0 * rel, 3) +
                            "% off) over 1e6 steps at dt " + fmt(dt)};
}

// --- 10: replay buffer -------------------------------------------------------

Outcome replay_buffer() {
    ddpg::ReplayBuffer fifo(5);
    for (int i = 0; i < 8; ++i) fifo.push({{double(i)}, {0.0}, double(i), {0.0}});
    bool fifo_ok = fifo.size() == 5;
    const auto items = fifo.ordered();
    for (std::size_t k = 0; k < items.size(); ++k) fifo_ok = fifo_ok && items[k]->reward == double(k + 3);

    ddpg::ReplayBuffer buf(10);
    for (int i = 0; i < 10; ++i) buf.push({{double(i)}, {0.0}, double(i), {0.0}});
    std::mt19937_64 rng(17);
    const std::size_t draws = 100000;
    std::map<std::size_t, std::size_t> counts;
    for (auto i : buf.sample_indices(draws, rng)) ++counts[i];
    const double p = 0.1, mean = draws * p, sd = std::sqrt(draws * p * (1 - p));
    double worst = 0.0;
    for (std::size_t i = 0; i < 10; ++i) worst = std::max(worst, std::abs(double(counts[i]) - mean) / sd);
    return {fifo_ok && counts.size() == 10 && worst <= 3.0,
            std::string("FIFO ") + (fifo_ok ? "exact" : "WRONG") + ", max deviation " + fmt(worst, 3) +
                " sigma over 1e5 draws"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 gradient oracle", gradient_oracle},
        {"2 MPC brute-force oracle", mpc_oracle},
        {"3 hand-worked equations", hand_equations},
        {"4 physical invariants (20-day MPC)", physical_invariants},
        {"5 determinism", determinism},
        {"6 learning progress (toy)", learning_progress},
        {"7 qualitative ordering (3 seeds)", qualitative_ordering},
        {"8 metrics fidelity", metrics_fidelity},
        {"9 OU noise statistics", ou_statistics},
        {"10 replay buffer", replay_buffer},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
