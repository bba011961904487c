#include <gtest/gtest.h>

#include <random>

#include "hvacgrid/nn.hpp"
#include "reference_mlp.hpp"

using namespace hvacgrid;
using namespace hvacgrid::nn;

namespace {

MlpSpec small_spec(bool bn, bool squash) {
    MlpSpec s;
    s.input = 3;
    s.hidden = {5, 4};
    s.output = 2;
    s.batch_norm = bn;
    s.final_init = 0.5;
    if (squash) {
        s.out_lo = {-1.0, 0.0};
        s.out_hi = {2.0, 1.0};
    }
    return s;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

// Perturbs BN scale/shift and running statistics away from identity so every
// parameter influences the output.
Mlp random_net(const MlpSpec& spec, std::mt19937_64& rng) {
    Mlp net(spec);
    net.init(rng);
    std::uniform_real_distribution<double> u(0.5, 1.5), v(-0.3, 0.3);
    auto& p = net.mutable_params();
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += v(rng);
    auto& b = net.mutable_buffers();
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = b[i] == 0.0 ? v(rng) : u(rng);
    return net;
}

double weighted_sum(const Matrix& y, const Matrix& w) { return (y.array() * w.array()).sum(); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST(MlpForward, ZeroNetGivesZeroOutput) {
    MlpSpec s = small_spec(true, false);
    const Mlp net(s);
    std::mt19937_64 rng(1);
    const Matrix y = net.forward(random_matrix(4, 3, rng), Mode::Eval);
    EXPECT_EQ(y.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MlpForward, EvalModeRepeatable) {
    std::mt19937_64 rng(2);
    const Mlp net = random_net(small_spec(true, true), rng);
    const Matrix x = random_matrix(6, 3, rng);
    EXPECT_EQ(net.forward(x, Mode::Eval), net.forward(x, Mode::Eval));
}

TEST(MlpForward, MatchesReferenceImplementation) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        for (bool bn : {true, false}) {
            for (bool squash : {true, false}) {
                const Mlp net = random_net(small_spec(bn, squash), rng);
                const Matrix x = random_matrix(5, 3, rng);
                for (bool train : {true, false}) {
                    const auto ref = testref::forward(net, testref::to_rows(x), train);
                    const Matrix y = net.forward(x, train ? Mode::Train : Mode::Eval);
                    for (Eigen::Index i = 0; i < y.rows(); ++i)
                        for (Eigen::Index j = 0; j < y.cols(); ++j)
                            ASSERT_NEAR(y(i, j), ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1e-12);
                }
            }
        }
    }
}

TEST(MlpForward, InputErrors) {
    const Mlp net(small_spec(true, false));
    std::mt19937_64 rng(4);
    EXPECT_THROW(net.forward(random_matrix(3, 2, rng), Mode::Eval), InputError);
    EXPECT_THROW(net.forward(random_matrix(1, 3, rng), Mode::Train), InputError);
    EXPECT_NO_THROW(net.forward(random_matrix(1, 3, rng), Mode::Eval));
}

TEST(MlpForward, BadSpecRejected) {
    MlpSpec s = small_spec(true, true);
    s.out_hi = {1.0};
    EXPECT_THROW(Mlp{s}, InputError);
    s = small_spec(true, false);
    s.hidden = {4, 0};
    EXPECT_THROW(Mlp{s}, InputError);
}

TEST(MlpBackward, MatchesFiniteDifferences) {
    std::mt19937_64 rng(5);
    const double h = 1e-5;
    for (int rep = 0; rep < 10; ++rep) {
        for (bool bn : {true, false}) {
            for (bool squash : {true, false}) {
                for (Mode mode : {Mode::Train, Mode::Eval}) {
                    Mlp net = random_net(small_spec(bn, squash), rng);
                    const Matrix x = random_matrix(4, 3, rng);
                    const Matrix w = random_matrix(4, 2, rng);
                    ForwardCache cache;
                    net.forward(x, mode, &cache);
                    const auto g = net.backward(cache, w);
                    ASSERT_EQ(g.params.size(), net.params().size());
                    for (Eigen::Index i = 0; i < net.params().size(); ++i) {
                        const double orig = net.params()[i];
                        net.mutable_params()[i] = orig + h;
                        const double up = weighted_sum(net.forward(x, mode), w);
                        net.mutable_params()[i] = orig - h;
                        const double dn = weighted_sum(net.forward(x, mode), w);
                        net.mutable_params()[i] = orig;
                        ASSERT_LT(rel_err(g.params[i], (up - dn) / (2.0 * h)), 1e-4)
                            << "param " << i << " bn " << bn << " squash " << squash;
                    }
                    Matrix xp = x;
                    for (Eigen::Index r = 0; r < x.rows(); ++r)
                        for (Eigen::Index c = 0; c < x.cols(); ++c) {
                            xp(r, c) = x(r, c) + h;
                            const double up = weighted_sum(net.forward(xp, mode), w);
                            xp(r, c) = x(r, c) - h;
                            const double dn = weighted_sum(net.forward(xp, mode), w);
                            xp(r, c) = x(r, c);
                            ASSERT_LT(rel_err(g.input(r, c), (up - dn) / (2.0 * h)), 1e-4);
                        }
                }
            }
        }
    }
}

TEST(MlpBackward, ZeroOutputGradientGivesZeroGradients) {
    std::mt19937_64 rng(6);
    const Mlp net = random_net(small_spec(true, true), rng);
    ForwardCache cache;
    net.forward(random_matrix(4, 3, rng), Mode::Train, &cache);
    const auto g = net.backward(cache, Matrix::Zero(4, 2));
    EXPECT_EQ(g.params.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.input.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MlpBackward, BatchGradientIsSumOfSampleGradients) {
    std::mt19937_64 rng(7);
    for (bool bn : {true, false}) {
        const Mlp net = random_net(small_spec(bn, true), rng);
        const Matrix x = random_matrix(6, 3, rng);
        const Matrix w = random_matrix(6, 2, rng);
        ForwardCache cache;
        net.forward(x, Mode::Eval, &cache);
        const Vector total = net.backward(cache, w).params;
        Vector acc = Vector::Zero(total.size());
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            ForwardCache c1;
            net.forward(x.row(r), Mode::Eval, &c1);
            acc += net.backward(c1, w.row(r)).params;
        }
        EXPECT_LT((acc - total).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(MlpBackward, StaleCacheRejected) {
    std::mt19937_64 rng(8);
    Mlp net = random_net(small_spec(true, false), rng);
    ForwardCache cache;
    net.forward(random_matrix(4, 3, rng), Mode::Train, &cache);
    net.mutable_params()[0] += 1.0;
    EXPECT_THROW(net.backward(cache, Matrix::Ones(4, 2)), StateError);
    ForwardCache empty;
    EXPECT_THROW(net.backward(empty, Matrix::Ones(4, 2)), StateError);
}

TEST(MlpBackward, OutputGradientShapeChecked) {
    std::mt19937_64 rng(9);
    const Mlp net = random_net(small_spec(false, false), rng);
    ForwardCache cache;
    net.forward(random_matrix(4, 3, rng), Mode::Train, &cache);
    EXPECT_THROW(net.backward(cache, Matrix::Ones(4, 3)), InputError);
}

TEST(MlpStatistics, RunningAveragesFollowBatches) {
    std::mt19937_64 rng(10);
    Mlp net = random_net(small_spec(true, false), rng);
    const Vector before = net.buffers();
    ForwardCache cache;
    net.forward(random_matrix(8, 3, rng), Mode::Train, &cache);
    net.commit_statistics(cache);
    EXPECT_NE(net.buffers(), before);
    const Vector p = net.params();
    EXPECT_EQ(net.params(), p);
    ForwardCache eval;
    net.forward(random_matrix(8, 3, rng), Mode::Eval, &eval);
    const Vector b2 = net.buffers();
    net.commit_statistics(eval);
    EXPECT_EQ(net.buffers(), b2);
}

TEST(Adam, ZeroGradientLeavesParameters) {
    AdamState st(3, 0.01);
    Vector p(3);
    p << 1.0, -2.0, 3.0;
    const Vector before = p;
    adam_step(st, p, Vector::Zero(3));
    EXPECT_EQ(p, before);
}

TEST(Adam, DegenerateMomentsFirstStep) {
    AdamState st(3, 0.01);
    st.beta1 = 0.0;
    st.beta2 = 0.0;
    Vector p(3), g(3);
    p << 1.0, -2.0, 3.0;
    g << 0.5, -4.0, 1e-3;
    const Vector before = p;
    adam_step(st, p, g);
    for (Eigen::Index i = 0; i < 3; ++i)
        EXPECT_NEAR(p[i], before[i] - 0.01 * g[i] / (std::abs(g[i]) + st.epsilon), 1e-15);
}

TEST(Adam, MinimisesQuadratic) {
    AdamState st(1, 0.05);
    Vector x(1);
    x << 1.0;
    for (int i = 0; i < 200; ++i) {
        Vector g(1);
        g << 2.0 * x[0];
        adam_step(st, x, g);
    }
    EXPECT_LT(std::abs(x[0]), 0.1);
}

TEST(Adam, ShapeMismatchRejected) {
    AdamState st(3);
    Vector p = Vector::Zero(3);
    EXPECT_THROW(adam_step(st, p, Vector::Zero(2)), InputError);
}

TEST(SoftUpdate, FullCopy) {
    std::mt19937_64 rng(11);
    const Mlp online = random_net(small_spec(true, false), rng);
    Mlp target = random_net(small_spec(true, false), rng);
    soft_update(target, online, 1.0);
    EXPECT_EQ(target.params(), online.params());
    EXPECT_EQ(target.buffers(), online.buffers());
}

TEST(SoftUpdate, ZeroRateKeepsTarget) {
    std::mt19937_64 rng(12);
    const Mlp online = random_net(small_spec(true, false), rng);
    Mlp target = random_net(small_spec(true, false), rng);
    const Vector before = target.params();
    soft_update(target, online, 0.0);
    EXPECT_EQ(target.params(), before);
}

TEST(SoftUpdate, HalfwayHandArithmetic) {
    MlpSpec s;
    s.input = 1;
    s.hidden = {1};
    s.output = 1;
    s.batch_norm = false;
    Mlp online(s), target(s);
    online.mutable_params().setConstant(2.0);
    target.mutable_params().setZero();
    soft_update(target, online, 0.5);
    for (Eigen::Index i = 0; i < target.params().size(); ++i) EXPECT_NEAR(target.params()[i], 1.0, 1e-15);
}

TEST(SoftUpdate, ContractsTowardOnline) {
    std::mt19937_64 rng(13);
    const Mlp online = random_net(small_spec(true, true), rng);
    Mlp target = random_net(small_spec(true, true), rng);
    const double tau = 0.3;
    const Vector gap_before = target.params() - online.params();
    soft_update(target, online, tau);
    const Vector gap_after = target.params() - online.params();
    for (Eigen::Index i = 0; i < gap_before.size(); ++i)
        EXPECT_NEAR(gap_after[i], (1.0 - tau) * gap_before[i], 1e-14);
}

TEST(SoftUpdate, ShapeMismatchRejected) {
    Mlp a(small_spec(true, false));
    MlpSpec s = small_spec(true, false);
    s.hidden = {3};
    const Mlp b(s);
    EXPECT_THROW(soft_update(a, b, 0.5), InputError);
    EXPECT_THROW(soft_update(a, a, 1.5), InputError);
}
