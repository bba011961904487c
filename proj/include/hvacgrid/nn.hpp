#pragma once

// Multilayer perceptron with batch normalisation and an Adam optimiser.
//
// Layout per hidden layer l: Linear -> BatchNorm -> ReLU. The output layer is
// linear, optionally squashed onto a per-output box [lo, hi] with
// lo + (hi - lo) * (tanh(z) + 1) / 2.
//
// All trainable parameters live in one flat vector so that optimisers, soft
// target updates and checkpoints treat a network as a single array. Within a
// layer the order is W (out x in, row-major), b, then gamma and beta for
// hidden layers. Running BN statistics are kept separately as "buffers"
// (mean, then variance, per hidden layer).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hvacgrid/errors.hpp"

namespace hvacgrid::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Mode { Train, Eval };

struct MlpSpec {
    std::size_t input = 1;
    std::vector<std::size_t> hidden{128, 128};
    std::size_t output = 1;
    bool batch_norm = true;
    double bn_momentum = 0.1;
    double bn_eps = 1e-5;
    double final_init = 3e-3;  // output layer drawn from U(-final_init, final_init)
    std::vector<double> out_lo;  // both empty -> linear output
    std::vector<double> out_hi;

    bool squashed() const { return !out_lo.empty(); }
};

struct ForwardCache {
    Mode mode = Mode::Eval;
    std::uint64_t version = 0;
    std::vector<Matrix> inputs;   // input to each linear layer
    std::vector<Matrix> xhat;     // normalised pre-activations (hidden layers)
    std::vector<RowVector> inv_std;
    std::vector<RowVector> batch_mean;
    std::vector<RowVector> batch_var;
    std::vector<Matrix> post;     // post-BN pre-ReLU values
    Matrix out_pre;               // output layer pre-squash
};

struct Gradients {
    Vector params;
    Matrix input;
};

class Mlp {
public:
    Mlp() = default;

    explicit Mlp(MlpSpec spec) : spec_(std::move(spec)) {
        if (spec_.input == 0 || spec_.output == 0) throw InputError("mlp: zero-width layer");
        if (spec_.squashed() && (spec_.out_lo.size() != spec_.output || spec_.out_hi.size() != spec_.output))
            throw InputError("mlp: output bounds must match output width");
        std::size_t fan_in = spec_.input;
        std::size_t off = 0, boff = 0;
        auto add = [&](std::size_t in, std::size_t out, bool hidden) {
            Layer l;
            l.in = in;
            l.out = out;
            l.w = off;
            off += in * out;
            l.b = off;
            off += out;
            if (hidden && spec_.batch_norm) {
                l.gamma = off;
                off += out;
                l.beta = off;
                off += out;
                l.rmean = boff;
                boff += out;
                l.rvar = boff;
                boff += out;
            }
            l.hidden = hidden;
            layers_.push_back(l);
        };
        for (std::size_t h : spec_.hidden) {
            if (h == 0) throw InputError("mlp: zero-width hidden layer");
            add(fan_in, h, true);
            fan_in = h;
        }
        add(fan_in, spec_.output, false);
        params_ = Vector::Zero(static_cast<Eigen::Index>(off));
        buffers_ = Vector::Zero(static_cast<Eigen::Index>(boff));
        for (const auto& l : layers_) {
            if (l.hidden && spec_.batch_norm) {
                params_.segment(l.gamma, l.out).setOnes();
                buffers_.segment(l.rvar, l.out).setOnes();
            }
        }
    }

    /// Fan-in uniform initialisation for hidden layers, a small uniform range
    /// for the output layer; BN scale/shift reset to identity.
    template <class Rng>
    void init(Rng& rng) {
        for (const auto& l : layers_) {
            const double bound = l.hidden ? 1.0 / std::sqrt(static_cast<double>(l.in)) : spec_.final_init;
            std::uniform_real_distribution<double> u(-bound, bound);
            for (std::size_t k = 0; k < l.in * l.out + l.out; ++k) params_[static_cast<Eigen::Index>(l.w + k)] = u(rng);
            if (l.hidden && spec_.batch_norm) {
                params_.segment(l.gamma, l.out).setOnes();
                params_.segment(l.beta, l.out).setZero();
                buffers_.segment(l.rmean, l.out).setZero();
                buffers_.segment(l.rvar, l.out).setOnes();
            }
        }
        ++version_;
    }

    const MlpSpec& spec() const { return spec_; }
    std::size_t input_width() const { return spec_.input; }
    std::size_t output_width() const { return spec_.output; }
    std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

    const Vector& params() const { return params_; }
    const Vector& buffers() const { return buffers_; }
    /// Mutable access invalidates outstanding forward caches.
    Vector& mutable_params() {
        ++version_;
        return params_;
    }
    Vector& mutable_buffers() {
        ++version_;
        return buffers_;
    }

    Matrix forward(const Matrix& x, Mode mode, ForwardCache* cache = nullptr) const {
        if (x.cols() != static_cast<Eigen::Index>(spec_.input))
            throw InputError("mlp forward: input width " + std::to_string(x.cols()) + " != " +
                             std::to_string(spec_.input));
        if (x.rows() == 0) throw InputError("mlp forward: empty batch");
        if (mode == Mode::Train && spec_.batch_norm && x.rows() < 2)
            throw InputError("mlp forward: train mode needs a batch of at least 2");
        if (cache) {
            *cache = ForwardCache{};
            cache->mode = mode;
            cache->version = version_;
        }
        Matrix a = x;
        const auto nrows = x.rows();
        for (const auto& l : layers_) {
            if (cache) cache->inputs.push_back(a);
            Matrix z = a * weight(l).transpose();
            z.rowwise() += params_.segment(l.b, l.out).transpose();
            if (!l.hidden) {
                if (cache) cache->out_pre = z;
                a = spec_.squashed() ? squash(z) : z;
                break;
            }
            if (spec_.batch_norm) {
                RowVector mean, var;
                if (mode == Mode::Train) {
                    mean = z.colwise().mean();
                    var = (z.rowwise() - mean).array().square().colwise().mean();
                } else {
                    mean = buffers_.segment(l.rmean, l.out).transpose();
                    var = buffers_.segment(l.rvar, l.out).transpose();
                }
                RowVector inv_std = (var.array() + spec_.bn_eps).rsqrt();
                Matrix xh = ((z.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
                Matrix y = (xh.array().rowwise() * params_.segment(l.gamma, l.out).transpose().array()).matrix();
                y.rowwise() += params_.segment(l.beta, l.out).transpose();
                if (cache) {
                    cache->xhat.push_back(xh);
                    cache->inv_std.push_back(inv_std);
                    cache->batch_mean.push_back(mean);
                    cache->batch_var.push_back(var);
                }
                z = std::move(y);
            }
            if (cache) cache->post.push_back(z);
            a = z.cwiseMax(0.0);
        }
        (void)nrows;
        return a;
    }

    /// Convenience single-row forward in eval mode.
    Vector forward_one(std::span<const double> x) const {
        Matrix m(1, static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = x[i];
        return forward(m, Mode::Eval).row(0).transpose();
    }

    /// Backpropagates dL/dY through the cached forward pass.
    Gradients backward(const ForwardCache& cache, const Matrix& dy) const {
        if (cache.version != version_ || cache.inputs.size() != layers_.size())
            throw StateError("mlp backward: forward cache is stale or missing");
        const auto nrows = cache.inputs.front().rows();
        if (dy.rows() != nrows || dy.cols() != static_cast<Eigen::Index>(spec_.output))
            throw InputError("mlp backward: output gradient shape mismatch");
        Gradients g;
        g.params = Vector::Zero(params_.size());
        Matrix d = dy;
        if (spec_.squashed()) {
            // y = lo + (hi-lo)(tanh z + 1)/2 -> dy/dz = (hi-lo)/2 (1 - tanh^2 z)
            for (Eigen::Index c = 0; c < d.cols(); ++c) {
                const double half = 0.5 * (spec_.out_hi[static_cast<std::size_t>(c)] - spec_.out_lo[static_cast<std::size_t>(c)]);
                for (Eigen::Index r = 0; r < d.rows(); ++r) {
                    const double t = std::tanh(cache.out_pre(r, c));
                    d(r, c) *= half * (1.0 - t * t);
                }
            }
        }
        std::size_t hidden_idx = cache.post.size();
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const Layer& l = layers_[li];
            if (l.hidden) {
                --hidden_idx;
                // ReLU
                d = (cache.post[hidden_idx].array() > 0.0).select(d, 0.0);
                if (spec_.batch_norm) {
                    const Matrix& xh = cache.xhat[hidden_idx];
                    const RowVector gamma = params_.segment(l.gamma, l.out).transpose();
                    g.params.segment(l.gamma, l.out) = (d.array() * xh.array()).colwise().sum().transpose();
                    g.params.segment(l.beta, l.out) = d.colwise().sum().transpose();
                    Matrix dxh = (d.array().rowwise() * gamma.array()).matrix();
                    const RowVector& inv_std = cache.inv_std[hidden_idx];
                    if (cache.mode == Mode::Train) {
                        const double n = static_cast<double>(nrows);
                        const RowVector sum_dxh = dxh.colwise().sum();
                        const RowVector sum_dxh_xh = (dxh.array() * xh.array()).colwise().sum();
                        Matrix t = (dxh * n);
                        t.rowwise() -= sum_dxh;
                        t -= (xh.array().rowwise() * sum_dxh_xh.array()).matrix();
                        d = (t.array().rowwise() * (inv_std.array() / n)).matrix();
                    } else {
                        d = (dxh.array().rowwise() * inv_std.array()).matrix();
                    }
                }
            }
            const Matrix& a = cache.inputs[li];
            // dW = d^T a (out x in), db = column sums
            Matrix dw = d.transpose() * a;
            g.params.segment(l.w, l.in * l.out) = Eigen::Map<const Vector>(dw.data(), dw.size());
            g.params.segment(l.b, l.out) = d.colwise().sum().transpose();
            d = d * weight(l);
        }
        g.input = std::move(d);
        return g;
    }

    /// Folds the batch statistics of a train-mode pass into the running averages.
    void commit_statistics(const ForwardCache& cache) {
        if (!spec_.batch_norm || cache.mode != Mode::Train) return;
        if (cache.version != version_) throw StateError("mlp: stale cache");
        const double m = spec_.bn_momentum;
        const double n = static_cast<double>(cache.inputs.front().rows());
        std::size_t h = 0;
        for (const auto& l : layers_) {
            if (!l.hidden) continue;
            auto rm = buffers_.segment(l.rmean, l.out);
            auto rv = buffers_.segment(l.rvar, l.out);
            rm = (1.0 - m) * rm + m * cache.batch_mean[h].transpose();
            rv = (1.0 - m) * rv + m * (cache.batch_var[h].transpose() * (n / (n - 1.0)));
            ++h;
        }
        // buffers changed but parameters did not: the cache stays valid
    }

    bool same_shape(const Mlp& other) const {
        return params_.size() == other.params_.size() && buffers_.size() == other.buffers_.size() &&
               spec_.input == other.spec_.input && spec_.output == other.spec_.output &&
               spec_.hidden == other.spec_.hidden;
    }

private:
    struct Layer {
        std::size_t in = 0, out = 0;
        std::size_t w = 0, b = 0, gamma = 0, beta = 0;
        std::size_t rmean = 0, rvar = 0;
        bool hidden = false;
    };

    Eigen::Map<const Matrix> weight(const Layer& l) const {
        return {params_.data() + l.w, static_cast<Eigen::Index>(l.out), static_cast<Eigen::Index>(l.in)};
    }

    Matrix squash(const Matrix& z) const {
        Matrix y(z.rows(), z.cols());
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            const double lo = spec_.out_lo[static_cast<std::size_t>(c)];
            const double hi = spec_.out_hi[static_cast<std::size_t>(c)];
            for (Eigen::Index r = 0; r < z.rows(); ++r) y(r, c) = lo + (hi - lo) * 0.5 * (std::tanh(z(r, c)) + 1.0);
        }
        return y;
    }

    MlpSpec spec_;
    std::vector<Layer> layers_;
    Vector params_;
    Vector buffers_;
    std::uint64_t version_ = 0;
};

struct AdamState {
    Vector m;
    Vector v;
    std::uint64_t step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n, double lr = 1e-3)
        : m(Vector::Zero(static_cast<Eigen::Index>(n))), v(Vector::Zero(static_cast<Eigen::Index>(n))), learning_rate(lr) {}
};

/// Bias-corrected Adam update, in place.
inline void adam_step(AdamState& st, Eigen::Ref<Vector> params, const Eigen::Ref<const Vector>& grads) {
    if (params.size() != grads.size() || st.m.size() != params.size() || st.v.size() != params.size())
        throw InputError("adam_step: shape mismatch");
    ++st.step;
    const double t = static_cast<double>(st.step);
    const double c1 = 1.0 - std::pow(st.beta1, t);
    const double c2 = 1.0 - std::pow(st.beta2, t);
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
        const double mh = c1 > 0.0 ? st.m[i] / c1 : st.m[i];
        const double vh = c2 > 0.0 ? st.v[i] / c2 : st.v[i];
        params[i] -= st.learning_rate * mh / (std::sqrt(vh) + st.epsilon);
    }
}

/// theta' <- tau theta + (1 - tau) theta', applied to parameters and BN buffers.
inline void soft_update(Mlp& target, const Mlp& online, double tau) {
    if (!target.same_shape(online)) throw InputError("soft_update: network shapes differ");
    if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("soft_update: tau must be in [0,1]");
    if (tau == 1.0) {
        target.mutable_params() = online.params();
        target.mutable_buffers() = online.buffers();
        return;
    }
    if (tau == 0.0) return;
    target.mutable_params() = tau * online.params() + (1.0 - tau) * target.params();
    target.mutable_buffers() = tau * online.buffers() + (1.0 - tau) * target.buffers();
}

}  // namespace hvacgrid::nn
