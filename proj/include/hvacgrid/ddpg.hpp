#pragma once

// Deep deterministic policy gradient: replay buffer, Ornstein-Uhlenbeck
// exploration, actor/critic updates with target networks, the training loop
// and greedy deployment, plus a plain-text checkpoint format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hvacgrid/errors.hpp"
#include "hvacgrid/nn.hpp"
#include "hvacgrid/numfmt.hpp"

namespace hvacgrid::ddpg {

using nn::Matrix;
using nn::Mlp;
using nn::Mode;
using nn::Vector;

struct Experience {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
};

/// Fixed-capacity FIFO of transitions with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw InputError("replay buffer: capacity must be positive");
        items_.reserve(std::min<std::size_t>(capacity, 4096));
    }

    void push(Experience e) {
        if (e.state.size() != e.next_state.size()) throw InputError("replay buffer: state dimensions differ");
        for (double v : e.state) detail::require(std::isfinite(v), "replay buffer: non-finite state");
        for (double v : e.next_state) detail::require(std::isfinite(v), "replay buffer: non-finite next state");
        for (double v : e.action) detail::require(std::isfinite(v), "replay buffer: non-finite action");
        detail::require(std::isfinite(e.reward), "replay buffer: non-finite reward");
        if (items_.size() < capacity_) {
            items_.push_back(std::move(e));
        } else {
            items_[cursor_] = std::move(e);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// Items from oldest to newest.
    std::vector<const Experience*> ordered() const {
        std::vector<const Experience*> out;
        out.reserve(items_.size());
        const std::size_t start = items_.size() < capacity_ ? 0 : cursor_;
        for (std::size_t k = 0; k < items_.size(); ++k) out.push_back(&items_[(start + k) % items_.size()]);
        return out;
    }

    template <class Rng>
    std::vector<std::size_t> sample_indices(std::size_t k, Rng& rng) const {
        if (items_.empty()) throw StateError("replay buffer: sampling from an empty buffer");
        std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
        std::vector<std::size_t> idx(k);
        for (auto& i : idx) i = pick(rng);
        return idx;
    }

    const Experience& at(std::size_t i) const { return items_.at(i); }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Experience> items_;
};

struct OuNoise {
    std::vector<double> state;
    double mu = 0.0;
    double theta = 0.15;
    double sigma = 0.2;
    double scale = 0.35;

    OuNoise() = default;
    OuNoise(std::size_t dim, double mu_, double theta_, double sigma_, double scale_)
        : state(dim, mu_), mu(mu_), theta(theta_), sigma(sigma_), scale(scale_) {}

    void reset() { std::fill(state.begin(), state.end(), mu); }
};

/// n <- n + theta (mu - n) dt + sigma sqrt(dt) N(0,1); returns scale * n.
template <class Rng>
std::vector<double> ou_sample(OuNoise& noise, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw InputError("ou_sample: dt must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(noise.state.size());
    const double sq = std::sqrt(dt);
    for (std::size_t i = 0; i < noise.state.size(); ++i) {
        double& n = noise.state[i];
        n += noise.theta * (noise.mu - n) * dt + noise.sigma * sq * normal(rng);
        out[i] = noise.scale * n;
    }
    return out;
}

struct StepResult {
    std::vector<double> state;
    double reward = 0.0;
};

/// Episodic environment contract used by the training and deployment loops.
class Environment {
public:
    virtual ~Environment() = default;
    virtual std::size_t state_dim() const = 0;
    virtual std::size_t action_dim() const = 0;
    virtual std::vector<double> action_low() const = 0;
    virtual std::vector<double> action_high() const = 0;
    /// Typical centre and spread of each state component, used to normalise network inputs.
    virtual std::vector<double> state_center() const = 0;
    virtual std::vector<double> state_scale() const = 0;
    virtual std::size_t num_days() const = 0;
    virtual std::vector<double> reset(std::size_t day) = 0;
    virtual StepResult step(std::span<const double> action) = 0;
};

struct DdpgConfig {
    std::vector<std::size_t> hidden{128, 128};
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double tau = 1e-3;
    double discount = 0.99;
    std::size_t batch_size = 128;
    std::size_t buffer_capacity = 100000;
    double ou_mu = 0.0;
    double ou_theta = 0.15;
    double ou_sigma = 0.2;
    double ou_dt = 1.0;
    double explore_start = 0.35;
    double explore_end = 0.05;
    double reward_scale = 1.0;

    void validate() const {
        detail::require(!hidden.empty(), "ddpg: need at least one hidden layer");
        detail::require(actor_lr > 0.0 && critic_lr > 0.0, "ddpg: learning rates must be positive");
        detail::require(tau > 0.0 && tau <= 1.0, "ddpg: tau must be in (0,1]");
        detail::require(discount >= 0.0 && discount < 1.0, "ddpg: discount must be in [0,1)");
        detail::require(batch_size >= 2, "ddpg: batch size must be >= 2");
        detail::require(buffer_capacity >= batch_size, "ddpg: buffer smaller than batch");
        detail::require(explore_start >= 0.0 && explore_end >= 0.0, "ddpg: exploration scale must be >= 0");
        detail::require(ou_dt > 0.0, "ddpg: ou_dt must be positive");
    }
};

struct Batch {
    Matrix states;       // normalised
    Matrix actions;      // normalised to [-1, 1]
    Vector rewards;
    Matrix next_states;  // normalised
};

class DdpgAgent {
public:
    DdpgAgent(DdpgConfig cfg, std::size_t state_dim, std::vector<double> action_lo, std::vector<double> action_hi,
              std::uint64_t seed, std::vector<double> state_center = {}, std::vector<double> state_scale = {})
        : cfg_(std::move(cfg)),
          state_dim_(state_dim),
          lo_(std::move(action_lo)),
          hi_(std::move(action_hi)),
          center_(std::move(state_center)),
          scale_(std::move(state_scale)),
          buffer_(std::max<std::size_t>(cfg_.buffer_capacity, 1)),
          rng_(seed) {
        cfg_.validate();
        if (state_dim_ == 0) throw InputError("ddpg: state dimension must be positive");
        if (lo_.empty() || lo_.size() != hi_.size()) throw InputError("ddpg: action bounds malformed");
        for (std::size_t i = 0; i < lo_.size(); ++i)
            detail::require(lo_[i] < hi_[i], "ddpg: action lower bound must be below upper bound");
        if (center_.empty()) center_.assign(state_dim_, 0.0);
        if (scale_.empty()) scale_.assign(state_dim_, 1.0);
        if (center_.size() != state_dim_ || scale_.size() != state_dim_)
            throw InputError("ddpg: normalisation vectors must match state dimension");
        for (double s : scale_) detail::require(s > 0.0, "ddpg: state scale must be positive");

        nn::MlpSpec as;
        as.input = state_dim_;
        as.hidden = cfg_.hidden;
        as.output = lo_.size();
        as.out_lo = lo_;
        as.out_hi = hi_;
        actor_ = Mlp(as);
        actor_.init(rng_);

        nn::MlpSpec cs;
        cs.input = state_dim_ + lo_.size();
        cs.hidden = cfg_.hidden;
        cs.output = 1;
        critic_ = Mlp(cs);
        critic_.init(rng_);

        target_actor_ = actor_;
        target_critic_ = critic_;
        actor_opt_ = nn::AdamState(actor_.num_params(), cfg_.actor_lr);
        critic_opt_ = nn::AdamState(critic_.num_params(), cfg_.critic_lr);
        noise_ = OuNoise(lo_.size(), cfg_.ou_mu, cfg_.ou_theta, cfg_.ou_sigma, cfg_.explore_start);
    }

    const DdpgConfig& config() const { return cfg_; }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t action_dim() const { return lo_.size(); }
    const std::vector<double>& action_low() const { return lo_; }
    const std::vector<double>& action_high() const { return hi_; }

    Mlp& actor() { return actor_; }
    Mlp& critic() { return critic_; }
    Mlp& target_actor() { return target_actor_; }
    Mlp& target_critic() { return target_critic_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& critic() const { return critic_; }
    const Mlp& target_actor() const { return target_actor_; }
    const Mlp& target_critic() const { return target_critic_; }
    ReplayBuffer& buffer() { return buffer_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    OuNoise& noise() { return noise_; }
    std::mt19937_64& rng() { return rng_; }
    const nn::AdamState& actor_optimizer() const { return actor_opt_; }
    const nn::AdamState& critic_optimizer() const { return critic_opt_; }

    bool trained() const { return trained_; }
    void mark_trained(bool t = true) { trained_ = t; }

    std::vector<double> normalize_state(std::span<const double> s) const {
        if (s.size() != state_dim_) throw InputError("ddpg: state dimension mismatch");
        std::vector<double> out(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - center_[i]) / scale_[i];
        return out;
    }
    double normalize_action(double a, std::size_t i) const { return 2.0 * (a - lo_[i]) / (hi_[i] - lo_[i]) - 1.0; }

    std::vector<double> clip_action(std::span<const double> a) const {
        std::vector<double> out(a.begin(), a.end());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo_[i], hi_[i]);
        return out;
    }

    /// mu(s) in eval mode, plus OU noise scaled to each action's half-range when exploring.
    std::vector<double> act(std::span<const double> state, bool explore) {
        const auto ns = normalize_state(state);
        const Vector out = actor_.forward_one(ns);
        std::vector<double> a(out.data(), out.data() + out.size());
        if (explore) {
            const auto n = ou_sample(noise_, cfg_.ou_dt, rng_);
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += n[i] * 0.5 * (hi_[i] - lo_[i]);
        }
        return clip_action(a);
    }

    /// Greedy action without touching any agent state.
    std::vector<double> policy(std::span<const double> state) const {
        const auto ns = normalize_state(state);
        const Vector out = actor_.forward_one(ns);
        return clip_action(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())));
    }

    void remember(Experience e) {
        if (e.state.size() != state_dim_ || e.action.size() != action_dim())
            throw InputError("ddpg: experience dimensions do not match the agent");
        buffer_.push(std::move(e));
    }

    Batch make_batch(std::span<const std::size_t> idx) const {
        const auto k = static_cast<Eigen::Index>(idx.size());
        Batch b{Matrix(k, static_cast<Eigen::Index>(state_dim_)), Matrix(k, static_cast<Eigen::Index>(action_dim())),
                Vector(k), Matrix(k, static_cast<Eigen::Index>(state_dim_))};
        for (Eigen::Index r = 0; r < k; ++r) {
            const Experience& e = buffer_.at(idx[static_cast<std::size_t>(r)]);
            const auto s = normalize_state(e.state);
            const auto s2 = normalize_state(e.next_state);
            for (std::size_t c = 0; c < state_dim_; ++c) {
                b.states(r, static_cast<Eigen::Index>(c)) = s[c];
                b.next_states(r, static_cast<Eigen::Index>(c)) = s2[c];
            }
            for (std::size_t c = 0; c < action_dim(); ++c)
                b.actions(r, static_cast<Eigen::Index>(c)) = normalize_action(e.action[c], c);
            b.rewards[r] = e.reward * cfg_.reward_scale;
        }
        return b;
    }

    /// Critic input [s, a_normalised] from a physical action batch.
    Matrix critic_input(const Matrix& states, const Matrix& actions_physical) const {
        Matrix x(states.rows(), states.cols() + actions_physical.cols());
        x.leftCols(states.cols()) = states;
        for (Eigen::Index c = 0; c < actions_physical.cols(); ++c) {
            const auto i = static_cast<std::size_t>(c);
            x.col(states.cols() + c) =
                (2.0 * (actions_physical.col(c).array() - lo_[i]) / (hi_[i] - lo_[i]) - 1.0).matrix();
        }
        return x;
    }

    /// y_i = r_i + discount * Q'(s_{i+1}, mu'(s_{i+1})), target networks in eval mode.
    Vector bellman_targets(const Batch& b) const {
        if (b.states.rows() == 0) throw InputError("bellman_targets: empty batch");
        const Matrix a2 = target_actor_.forward(b.next_states, Mode::Eval);
        const Matrix q2 = target_critic_.forward(critic_input(b.next_states, a2), Mode::Eval);
        return b.rewards + cfg_.discount * q2.col(0);
    }

    /// One Adam step on the mean squared Bellman error; returns the pre-step loss.
    double critic_update(const Batch& b) {
        if (b.states.rows() < 2) throw InputError("critic_update: batch must hold at least 2 transitions");
        const Vector y = bellman_targets(b);
        Matrix x(b.states.rows(), b.states.cols() + b.actions.cols());
        x << b.states, b.actions;
        nn::ForwardCache cache;
        const Matrix q = critic_.forward(x, Mode::Train, &cache);
        critic_.commit_statistics(cache);
        const Vector err = q.col(0) - y;
        const double n = static_cast<double>(err.size());
        const double loss = err.squaredNorm() / n;
        Matrix dq = (2.0 / n) * err;
        const auto g = critic_.backward(cache, dq);
        nn::adam_step(critic_opt_, critic_.mutable_params(), g.params);
        return loss;
    }

    /// Gradient of -mean Q(s, mu(s)) with respect to actor parameters.
    Vector actor_gradient(const Matrix& states, nn::ForwardCache* actor_cache_out = nullptr) const {
        nn::ForwardCache acache, ccache;
        const Matrix a = actor_.forward(states, Mode::Train, &acache);
        critic_.forward(critic_input(states, a), Mode::Train, &ccache);
        const double n = static_cast<double>(states.rows());
        const Matrix dq = Matrix::Constant(states.rows(), 1, -1.0 / n);
        const auto cg = critic_.backward(ccache, dq);
        // chain through the action normalisation
        Matrix da = cg.input.rightCols(static_cast<Eigen::Index>(action_dim()));
        for (Eigen::Index c = 0; c < da.cols(); ++c) {
            const auto i = static_cast<std::size_t>(c);
            da.col(c) *= 2.0 / (hi_[i] - lo_[i]);
        }
        const auto ag = actor_.backward(acache, da);
        if (actor_cache_out) *actor_cache_out = std::move(acache);
        return ag.params;
    }

    /// Deterministic policy-gradient step; returns the gradient norm.
    double actor_update(const Batch& b) {
        if (b.states.rows() < 2) throw InputError("actor_update: batch must hold at least 2 transitions");
        nn::ForwardCache acache;
        const Vector g = actor_gradient(b.states, &acache);
        actor_.commit_statistics(acache);
        nn::adam_step(actor_opt_, actor_.mutable_params(), g);
        return g.norm();
    }

    void soft_update_targets() {
        nn::soft_update(target_critic_, critic_, cfg_.tau);
        nn::soft_update(target_actor_, actor_, cfg_.tau);
    }

    struct UpdateStats {
        double critic_loss = 0.0;
        double actor_grad_norm = 0.0;
    };

    /// Sample a mini-batch and run critic, actor and target updates.
    UpdateStats learn() {
        const auto idx = buffer_.sample_indices(cfg_.batch_size, rng_);
        const Batch b = make_batch(idx);
        UpdateStats st;
        st.critic_loss = critic_update(b);
        st.actor_grad_norm = actor_update(b);
        soft_update_targets();
        return st;
    }

    // --- checkpoint ---------------------------------------------------------

    void save(std::ostream& os) const {
        os << "hvacgrid-ddpg-checkpoint 1\n";
        os << "state_dim " << state_dim_ << "\n";
        os << "action_dim " << action_dim() << "\n";
        os << "hidden " << cfg_.hidden.size();
        for (auto h : cfg_.hidden) os << ' ' << h;
        os << "\n";
        os << "trained " << (trained_ ? 1 : 0) << "\n";
        auto scalars = [&](const char* name, double v) { os << name << ' ' << fmt_double(v) << "\n"; };
        scalars("actor_lr", cfg_.actor_lr);
        scalars("critic_lr", cfg_.critic_lr);
        scalars("tau", cfg_.tau);
        scalars("discount", cfg_.discount);
        os << "batch_size " << cfg_.batch_size << "\n";
        os << "buffer_capacity " << cfg_.buffer_capacity << "\n";
        scalars("ou_mu", cfg_.ou_mu);
        scalars("ou_theta", cfg_.ou_theta);
        scalars("ou_sigma", cfg_.ou_sigma);
        scalars("ou_dt", cfg_.ou_dt);
        scalars("explore_start", cfg_.explore_start);
        scalars("explore_end", cfg_.explore_end);
        scalars("reward_scale", cfg_.reward_scale);
        scalars("noise_scale", noise_.scale);
        auto vec = [&](const char* name, const auto& v) {
            os << "vector " << name << ' ' << v.size() << "\n";
            for (decltype(v.size()) i = 0; i < v.size(); ++i) os << fmt_double(v[i]) << "\n";
        };
        vec("action_lo", lo_);
        vec("action_hi", hi_);
        vec("state_center", center_);
        vec("state_scale", scale_);
        vec("actor.params", actor_.params());
        vec("actor.buffers", actor_.buffers());
        vec("critic.params", critic_.params());
        vec("critic.buffers", critic_.buffers());
        vec("target_actor.params", target_actor_.params());
        vec("target_actor.buffers", target_actor_.buffers());
        vec("target_critic.params", target_critic_.params());
        vec("target_critic.buffers", target_critic_.buffers());
        vec("actor_adam.m", actor_opt_.m);
        vec("actor_adam.v", actor_opt_.v);
        os << "actor_adam.step " << actor_opt_.step << "\n";
        vec("critic_adam.m", critic_opt_.m);
        vec("critic_adam.v", critic_opt_.v);
        os << "critic_adam.step " << critic_opt_.step << "\n";
        vec("noise.state", noise_.state);
        os << "rng " << rng_ << "\n";
        os << "end\n";
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write checkpoint " + path);
        save(os);
    }

    static DdpgAgent load(std::istream& is) {
        std::string tok;
        int version = 0;
        is >> tok >> version;
        if (tok != "hvacgrid-ddpg-checkpoint" || version != 1)
            throw ParseError("not a version-1 hvacgrid checkpoint", 1);
        std::size_t line = 1;
        auto expect = [&](const char* key) {
            ++line;
            is >> tok;
            if (tok != key) throw ParseError(std::string("checkpoint: expected '") + key + "', found '" + tok + "'", line);
        };
        auto read_size = [&](const char* key) {
            expect(key);
            std::size_t v = 0;
            is >> v;
            return v;
        };
        auto read_double = [&](const char* key) {
            expect(key);
            is >> tok;
            const auto v = parse_double(tok);
            if (!v) throw ParseError(std::string("checkpoint: bad number for ") + key, line);
            return *v;
        };
        auto read_vec = [&](const char* name) {
            expect("vector");
            is >> tok;
            if (tok != name) throw ParseError(std::string("checkpoint: expected vector ") + name, line);
            std::size_t n = 0;
            is >> n;
            std::vector<double> v(n);
            for (auto& x : v) {
                ++line;
                is >> tok;
                const auto p = parse_double(tok);
                if (!p) throw ParseError("checkpoint: bad number in " + std::string(name), line);
                x = *p;
            }
            return v;
        };
        DdpgConfig cfg;
        const std::size_t sd = read_size("state_dim");
        const std::size_t ad = read_size("action_dim");
        const std::size_t nh = read_size("hidden");
        cfg.hidden.resize(nh);
        for (auto& h : cfg.hidden) is >> h;
        const bool trained = read_size("trained") != 0;
        cfg.actor_lr = read_double("actor_lr");
        cfg.critic_lr = read_double("critic_lr");
        cfg.tau = read_double("tau");
        cfg.discount = read_double("discount");
        cfg.batch_size = read_size("batch_size");
        cfg.buffer_capacity = read_size("buffer_capacity");
        cfg.ou_mu = read_double("ou_mu");
        cfg.ou_theta = read_double("ou_theta");
        cfg.ou_sigma = read_double("ou_sigma");
        cfg.ou_dt = read_double("ou_dt");
        cfg.explore_start = read_double("explore_start");
        cfg.explore_end = read_double("explore_end");
        cfg.reward_scale = read_double("reward_scale");
        const double noise_scale = read_double("noise_scale");
        auto lo = read_vec("action_lo");
        auto hi = read_vec("action_hi");
        auto center = read_vec("state_center");
        auto scale = read_vec("state_scale");
        if (lo.size() != ad) throw ParseError("checkpoint: action bound size mismatch", line);
        DdpgAgent agent(cfg, sd, lo, hi, 0, center, scale);
        auto fill = [&](Vector& dst, const char* name) {
            const auto v = read_vec(name);
            if (static_cast<Eigen::Index>(v.size()) != dst.size())
                throw ParseError(std::string("checkpoint: size mismatch for ") + name, line);
            for (std::size_t i = 0; i < v.size(); ++i) dst[static_cast<Eigen::Index>(i)] = v[i];
        };
        fill(agent.actor_.mutable_params(), "actor.params");
        fill(agent.actor_.mutable_buffers(), "actor.buffers");
        fill(agent.critic_.mutable_params(), "critic.params");
        fill(agent.critic_.mutable_buffers(), "critic.buffers");
        fill(agent.target_actor_.mutable_params(), "target_actor.params");
        fill(agent.target_actor_.mutable_buffers(), "target_actor.buffers");
        fill(agent.target_critic_.mutable_params(), "target_critic.params");
        fill(agent.target_critic_.mutable_buffers(), "target_critic.buffers");
        fill(agent.actor_opt_.m, "actor_adam.m");
        fill(agent.actor_opt_.v, "actor_adam.v");
        agent.actor_opt_.step = read_size("actor_adam.step");
        fill(agent.critic_opt_.m, "critic_adam.m");
        fill(agent.critic_opt_.v, "critic_adam.v");
        agent.critic_opt_.step = read_size("critic_adam.step");
        agent.noise_.state = read_vec("noise.state");
        agent.noise_.scale = noise_scale;
        expect("rng");
        is >> agent.rng_;
        expect("end");
        if (!is) throw ParseError("checkpoint: truncated", line);
        agent.trained_ = trained;
        return agent;
    }

    static DdpgAgent load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open checkpoint " + path);
        return load(is);
    }

private:
    DdpgConfig cfg_;
    std::size_t state_dim_;
    std::vector<double> lo_, hi_;
    std::vector<double> center_, scale_;
    Mlp actor_, critic_, target_actor_, target_critic_;
    nn::AdamState actor_opt_, critic_opt_;
    ReplayBuffer buffer_;
    OuNoise noise_;
    std::mt19937_64 rng_;
    bool trained_ = false;
};

struct EpisodeLog {
    std::size_t day = 0;
    double episode_return = 0.0;
    double noise_scale = 0.0;
    std::size_t updates = 0;
    double mean_critic_loss = 0.0;
};

struct TrainingLog {
    std::vector<EpisodeLog> episodes;
    std::vector<double> returns() const {
        std::vector<double> r;
        for (const auto& e : episodes) r.push_back(e.episode_return);
        return r;
    }
};

inline void check_env(const DdpgAgent& agent, const Environment& env) {
    if (env.state_dim() != agent.state_dim() || env.action_dim() != agent.action_dim())
        throw InputError("ddpg: environment dimensions do not match the agent");
}

/// Training loop: for each episode pick a random training day, reset the
/// noise, then per slot act with exploration, step, store the transition and
/// (once the buffer holds a full mini-batch) update critic, actor and targets.
/// Exploration scale decays linearly from explore_start to explore_end.
inline TrainingLog train(DdpgAgent& agent, Environment& env, std::size_t episodes, std::size_t slots,
                         std::uint64_t seed) {
    check_env(agent, env);
    if (env.num_days() == 0) throw InputError("ddpg train: environment has no days");
    std::mt19937_64 day_rng(seed);
    std::uniform_int_distribution<std::size_t> pick_day(0, env.num_days() - 1);
    const auto& cfg = agent.config();
    TrainingLog log;
    for (std::size_t m = 0; m < episodes; ++m) {
        EpisodeLog ep;
        ep.day = pick_day(day_rng);
        const double frac = episodes > 1 ? static_cast<double>(m) / static_cast<double>(episodes - 1) : 0.0;
        agent.noise().scale = cfg.explore_start + (cfg.explore_end - cfg.explore_start) * frac;
        agent.noise().reset();
        ep.noise_scale = agent.noise().scale;
        auto s = env.reset(ep.day);
        double loss_sum = 0.0;
        for (std::size_t t = 0; t < slots; ++t) {
            auto a = agent.act(s, true);
            auto res = env.step(a);
            ep.episode_return += res.reward;
            agent.remember({s, a, res.reward, res.state});
            if (agent.buffer().size() >= cfg.batch_size) {
                loss_sum += agent.learn().critic_loss;
                ++ep.updates;
            }
            s = std::move(res.state);
        }
        ep.mean_critic_loss = ep.updates ? loss_sum / static_cast<double>(ep.updates) : 0.0;
        log.episodes.push_back(ep);
    }
    agent.mark_trained();
    return log;
}

struct DeployLog {
    std::vector<std::size_t> days;
    std::vector<double> returns;
    std::vector<std::vector<double>> actions;  // one entry per slot, all days
};

/// Greedy evaluation with frozen parameters, one episode per listed day.
inline DeployLog deploy(const DdpgAgent& agent, Environment& env, std::span<const std::size_t> days,
                        std::size_t slots) {
    if (!agent.trained()) throw StateError("ddpg deploy: agent has not been trained");
    check_env(agent, env);
    DeployLog log;
    for (std::size_t d : days) {
        auto s = env.reset(d);
        double ret = 0.0;
        for (std::size_t t = 0; t < slots; ++t) {
            auto a = agent.policy(s);
            auto res = env.step(a);
            ret += res.reward;
            log.actions.push_back(std::move(a));
            s = std::move(res.state);
        }
        log.days.push_back(d);
        log.returns.push_back(ret);
    }
    return log;
}

}  // namespace hvacgrid::ddpg
