#include "saci/sac/sac_agent.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace saci;
using namespace saci::sac;
using numcore::Rng;
using oracle::flatten;
using oracle::numeric_gradient;
using oracle::relative_error;

namespace {

constexpr std::size_t kObs = 6;
constexpr std::size_t kAct = 2;
const std::vector<std::size_t> kHidden{16, 16};

SacBatch random_batch(Eigen::Index n, Rng& rng)
{
    SacBatch b;
    b.states = numcore::standard_normal(n, kObs, rng);
    b.actions = numcore::standard_normal(n, kAct, rng).array().tanh().matrix();
    b.rewards = numcore::standard_normal(n, 1, rng).col(0);
    b.next_states = numcore::standard_normal(n, kObs, rng);
    b.dones = Vector::Zero(n);
    b.dones(1) = 1.0;
    return b;
}

// Naive soft value of one next state: min target Q minus alpha log pi, recomputed with
// scalar loops.
double naive_soft_value(const TwinQ& twin, const GaussianPolicy& policy, double alpha,
                        const std::vector<double>& s, const std::vector<double>& eps)
{
    const auto out = oracle::naive_forward(policy.net, s);
    std::vector<double> mean(out.begin(), out.begin() + kAct);
    std::vector<double> log_std(out.begin() + kAct, out.end());
    std::vector<double> u(kAct);
    std::vector<double> in = s;
    for (std::size_t d = 0; d < kAct; ++d) {
        log_std[d] = std::clamp(log_std[d], kLogStdMin, kLogStdMax);
        u[d] = mean[d] + std::exp(log_std[d]) * eps[d];
        in.push_back(std::tanh(u[d]));
    }
    const double lp = oracle::squashed_log_prob(mean, log_std, u, kSquashEpsilon);
    const double q1 = oracle::naive_forward(twin.q1_target, in)[0];
    const double q2 = oracle::naive_forward(twin.q2_target, in)[0];
    return std::min(q1, q2) - alpha * lp;
}

} // namespace

TEST(Policy, LogProbMatchesClosedForm)
{
    Rng rng(2);
    const auto policy = make_policy(kObs, kAct, kHidden, 3);
    const Matrix s = numcore::standard_normal(8, kObs, rng);
    const Matrix eps = numcore::standard_normal(8, kAct, rng);
    const auto e = evaluate_policy(policy, s, eps);
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        const auto out = oracle::naive_forward(policy.net, oracle::row(s, r));
        std::vector<double> mean(out.begin(), out.begin() + kAct);
        std::vector<double> log_std(out.begin() + kAct, out.end());
        std::vector<double> u(kAct);
        for (std::size_t d = 0; d < kAct; ++d) {
            u[d] = mean[d] + std::exp(log_std[d]) * eps(r, static_cast<Eigen::Index>(d));
            EXPECT_NEAR(e.actions(r, static_cast<Eigen::Index>(d)), std::tanh(u[d]), 1e-12);
        }
        EXPECT_NEAR(e.log_probs(r), oracle::squashed_log_prob(mean, log_std, u, kSquashEpsilon),
                    1e-10);
    }
}

TEST(Policy, DeterministicActionIsTanhMean)
{
    const auto policy = make_policy(kObs, kAct, kHidden, 4);
    const Vector s = Vector::LinSpaced(kObs, -1.0, 1.0);
    const Vector mean = policy_mean(policy, s);
    const Vector a = deterministic_action(policy, s);
    for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(kAct); ++d) {
        EXPECT_DOUBLE_EQ(a(d), std::tanh(mean(d)));
    }
    const auto zero_noise = sample_action(policy, s, Vector::Zero(kAct));
    EXPECT_TRUE((zero_noise.action.array() == a.array()).all());
}

TEST(Policy, LogStdIsClamped)
{
    auto policy = make_policy(2, 1, {4}, 1);
    policy.net.biases.back()(1) = 50.0;
    const auto e = evaluate_policy(policy, Matrix::Zero(1, 2), Matrix::Zero(1, 1));
    EXPECT_EQ(e.log_std(0, 0), kLogStdMax);
    EXPECT_EQ(e.log_std_active(0, 0), 0.0);
    policy.net.biases.back()(1) = -50.0;
    EXPECT_EQ(evaluate_policy(policy, Matrix::Zero(1, 2), Matrix::Zero(1, 1)).log_std(0, 0),
              kLogStdMin);
}

TEST(Policy, BackwardMatchesFiniteDifferences)
{
    Rng rng(9);
    auto policy = make_policy(kObs, kAct, kHidden, 5);
    const Matrix s = numcore::standard_normal(5, kObs, rng);
    const Matrix eps = numcore::standard_normal(5, kAct, rng);
    const Matrix ga = numcore::standard_normal(5, kAct, rng);
    const Vector gl = numcore::standard_normal(5, 1, rng).col(0);
    const auto e = evaluate_policy(policy, s, eps);
    const auto grads = policy_backward(policy, e, ga, gl);
    const auto loss = [&] {
        const auto x = evaluate_policy(policy, s, eps);
        return (x.actions.array() * ga.array()).sum() + x.log_probs.dot(gl);
    };
    EXPECT_LT(relative_error(flatten(grads), numeric_gradient(policy.net, loss)), 1e-4);
}

TEST(Critic, TdTargetsMatchScalarOracle)
{
    Rng rng(4);
    const auto twin = make_twin_q(kObs, kAct, kHidden, 6);
    const auto policy = make_policy(kObs, kAct, kHidden, 7);
    const auto batch = random_batch(6, rng);
    const Matrix noise = numcore::standard_normal(6, kAct, rng);
    const Vector y = td_targets(twin, policy, 0.3, 0.99, batch, noise);
    for (Eigen::Index r = 0; r < 6; ++r) {
        const double v = naive_soft_value(twin, policy, 0.3, oracle::row(batch.next_states, r),
                                          oracle::row(noise, r));
        EXPECT_NEAR(y(r), batch.rewards(r) + 0.99 * (1.0 - batch.dones(r)) * v, 1e-10);
    }
}

TEST(Critic, QLossGradientMatchesFiniteDifferences)
{
    Rng rng(5);
    auto twin = make_twin_q(kObs, kAct, kHidden, 8);
    const auto batch = random_batch(7, rng);
    const Vector targets = numcore::standard_normal(7, 1, rng).col(0);
    const auto l = q_loss_against(twin, batch, targets);
    const auto loss = [&] { return q_loss_against(twin, batch, targets).loss; };
    EXPECT_LT(relative_error(flatten(l.grad_q1), numeric_gradient(twin.q1, loss)), 1e-4);
    EXPECT_LT(relative_error(flatten(l.grad_q2), numeric_gradient(twin.q2, loss)), 1e-4);
    EXPECT_DOUBLE_EQ(l.loss, 0.5 * (l.loss_q1 + l.loss_q2));
}

TEST(Critic, TargetsAreHeldFixedInQLoss)
{
    Rng rng(6);
    const auto twin = make_twin_q(kObs, kAct, kHidden, 9);
    const auto policy = make_policy(kObs, kAct, kHidden, 10);
    const auto batch = random_batch(5, rng);
    const Matrix noise = numcore::standard_normal(5, kAct, rng);
    const auto full = q_loss(twin, batch, policy, 0.2, 0.99, noise);
    const auto fixed = q_loss_against(twin, batch, td_targets(twin, policy, 0.2, 0.99, batch, noise));
    EXPECT_EQ(flatten(full.grad_q1), flatten(fixed.grad_q1));
    EXPECT_EQ(full.loss, fixed.loss);
}

TEST(Critic, PolicyLossGradientMatchesFiniteDifferences)
{
    Rng rng(7);
    auto policy = make_policy(kObs, kAct, kHidden, 11);
    const auto twin = make_twin_q(kObs, kAct, kHidden, 12);
    const Matrix s = numcore::standard_normal(9, kObs, rng);
    const Matrix eps = numcore::standard_normal(9, kAct, rng);
    const auto term = policy_loss(policy, twin, s, 0.4, eps);
    const auto loss = [&] { return policy_loss(policy, twin, s, 0.4, eps).loss; };
    EXPECT_LT(relative_error(flatten(term.grads), numeric_gradient(policy.net, loss)), 1e-4);
}

TEST(Critic, SoftUpdateMovesTargetsByTau)
{
    auto twin = make_twin_q(kObs, kAct, kHidden, 13);
    EXPECT_EQ(flatten(twin.q1), flatten(twin.q1_target));
    twin.q1 = numcore::mlp_init(twin.q1.layer_sizes, 99);
    const auto before = flatten(twin.q1_target);
    soft_update_targets(twin, 1e-3);
    const auto after = flatten(twin.q1_target);
    const auto online = flatten(twin.q1);
    for (std::size_t i = 0; i < before.size(); ++i) {
        EXPECT_DOUBLE_EQ(after[i], (1.0 - 1e-3) * before[i] + 1e-3 * online[i]);
    }
}

TEST(Temperature, AlphaLossValueAndGradient)
{
    Temperature t;
    t.log_alpha = std::log(0.5);
    t.target_entropy = -3.0;
    const Vector lp = Vector::LinSpaced(4, 1.0, 4.0);
    const auto l = alpha_loss(t, lp);
    EXPECT_NEAR(l.loss, -0.5 * (2.5 - 3.0), 1e-15);
    const double h = 1e-6;
    Temperature up = t;
    Temperature down = t;
    up.log_alpha += h;
    down.log_alpha -= h;
    const double fd = (alpha_loss(up, lp).loss - alpha_loss(down, lp).loss) / (2 * h);
    EXPECT_NEAR(l.grad_log_alpha, fd, 1e-8);
    EXPECT_THROW(alpha_loss(t, Vector()), numcore::NumericError);
}

TEST(Temperature, MovesAgainstEntropyShortfall)
{
    for (const double lp : {1.0, 5.0}) {
        Temperature t;
        t.target_entropy = -3.0;
        double prev = t.alpha();
        for (int k = 0; k < 100; ++k) {
            apply_alpha_step(t, alpha_loss(t, Vector::Constant(8, lp)), 5e-4);
            if (lp < 3.0) {
                ASSERT_LT(t.alpha(), prev);  // entropy -1 above target: alpha falls
            } else {
                ASSERT_GT(t.alpha(), prev);
            }
            prev = t.alpha();
        }
    }
}

TEST(SquashedDensity, IntegratesToOne)
{
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        auto policy = make_policy(3, 1, {8}, 20 + trial);
        policy.net.biases.back()(1) = numcore::uniform(rng, -1.5, 0.5);
        const Vector s = numcore::standard_normal(3, 1, rng).col(0);
        const auto e0 = evaluate_policy(policy, s.transpose(), Matrix::Zero(1, 1));
        const double mu = e0.mean(0, 0);
        const double sigma = std::exp(e0.log_std(0, 0));
        // integrate p(a) da over a = tanh(u), da = (1 - a^2) du
        const int n = 200000;
        const double lo = mu - 12 * sigma;
        const double hi = mu + 12 * sigma;
        const double du = (hi - lo) / n;
        double total = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double u = lo + i * du;
            const double eps = (u - mu) / sigma;
            const auto a = sample_action(policy, s, Vector::Constant(1, eps));
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            total += w * std::exp(a.log_prob) * (1.0 - a.action(0) * a.action(0)) * du;
        }
        EXPECT_NEAR(total, 1.0, 0.01) << "mu " << mu << " sigma " << sigma;
    }
}

TEST(SquashedDensity, MonteCarloDensityAtModeWithinTwoPercent)
{
    const auto policy = [] {
        auto p = make_policy(1, 1, {4}, 3);
        for (auto& w : p.net.weights) {
            w.setZero();
        }
        p.net.biases.back() << 0.3, std::log(0.6);
        return p;
    }();
    const Vector s = Vector::Zero(1);
    const auto density = [&](double a) {
        const double u = std::atanh(a);
        const auto x = sample_action(policy, s, Vector::Constant(1, (u - 0.3) / 0.6));
        return std::exp(x.log_prob);
    };
    double mode = 0.0;
    double best = 0.0;
    for (int i = -9990; i <= 9990; ++i) {
        const double a = i / 10000.0;
        if (const double p = density(a); p > best) {
            best = p;
            mode = a;
        }
    }
    Rng rng(77);
    std::normal_distribution<double> normal;
    const double h = 0.01;
    std::size_t hits = 0;
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::tanh(0.3 + 0.6 * normal(rng));
        hits += std::abs(a - mode) <= h ? 1 : 0;
    }
    const double mc = static_cast<double>(hits) / (static_cast<double>(n) * 2 * h);
    EXPECT_NEAR(mc / best, 1.0, 0.02) << "mode " << mode;
}

TEST(Replay, RingBufferOverwritesOldest)
{
    RingBuffer<int> buf(3);
    for (int i = 0; i < 5; ++i) {
        buf.push(i);
    }
    EXPECT_EQ(buf.size(), 3u);
    EXPECT_EQ(buf.at_age(0), 2);
    EXPECT_EQ(buf.at_age(2), 4);
    EXPECT_THROW(RingBuffer<int>(0), numcore::ConfigError);
    Rng rng(1);
    for (auto idx : buf.sample_indices(100, rng)) {
        EXPECT_LT(idx, 3u);
    }
    RingBuffer<int> empty(2);
    EXPECT_THROW(empty.sample_indices(1, rng), std::logic_error);
}

TEST(Replay, GatherAndConcat)
{
    RingBuffer<Experience> buf(10);
    for (int i = 0; i < 4; ++i) {
        buf.push({Vector::Constant(2, i), Vector::Constant(1, -i), 0.5 * i,
                  Vector::Constant(2, i + 1), i == 3});
    }
    const auto b = gather_batch(buf, {3, 0, 3});
    ASSERT_EQ(b.size(), 3);
    EXPECT_EQ(b.states(0, 1), 3.0);
    EXPECT_EQ(b.actions(1, 0), 0.0);
    EXPECT_EQ(b.rewards(0), 1.5);
    EXPECT_EQ(b.next_states(1, 0), 1.0);
    EXPECT_EQ(b.dones(0), 1.0);
    EXPECT_EQ(b.dones(1), 0.0);
    const auto c = concat(b, gather_batch(buf, {1}));
    EXPECT_EQ(c.size(), 4);
    EXPECT_EQ(c.rewards(3), 0.5);
    EXPECT_EQ(concat(SacBatch{}, b).size(), 3);
}

TEST(Agent, UpdateWaitsForFullBatch)
{
    SacConfig cfg;
    cfg.hidden = {8};
    cfg.batch_size = 4;
    auto agent = make_sac_agent(2, 1, cfg, 1);
    RingBuffer<Experience> buf(10);
    Rng sampler(1);
    Rng noise(2);
    for (int i = 0; i < 3; ++i) {
        buf.push({Vector::Zero(2), Vector::Zero(1), 0.0, Vector::Zero(2), false});
    }
    const auto before = export_tensors(agent);
    EXPECT_FALSE(sac_update_step(agent, buf, cfg, sampler, noise));
    EXPECT_EQ(export_tensors(agent), before);
    EXPECT_EQ(sampler, Rng(1));
    buf.push({Vector::Ones(2), Vector::Zero(1), 1.0, Vector::Zero(2), true});
    EXPECT_TRUE(sac_update_step(agent, buf, cfg, sampler, noise));
    EXPECT_FALSE(export_tensors(agent) == before);
}

TEST(Agent, UpdatesAreDeterministic)
{
    SacConfig cfg;
    cfg.hidden = {16};
    cfg.batch_size = 8;
    RingBuffer<Experience> buf(100);
    Rng data(3);
    for (int i = 0; i < 50; ++i) {
        buf.push({numcore::standard_normal(3, 1, data).col(0), Vector::Constant(2, 0.1 * (i % 5)),
                  numcore::uniform(data, -1, 1), numcore::standard_normal(3, 1, data).col(0),
                  i % 7 == 0});
    }
    auto run = [&] {
        auto agent = make_sac_agent(3, 2, cfg, 42);
        Rng s(5);
        Rng n(6);
        for (int k = 0; k < 30; ++k) {
            sac_update_step(agent, buf, cfg, s, n);
        }
        return export_tensors(agent);
    };
    EXPECT_EQ(run(), run());
}

TEST(Agent, ExportImportRoundTrip)
{
    SacConfig cfg;
    cfg.hidden = {8, 8};
    auto a = make_sac_agent(3, 2, cfg, 1);
    a.temp.log_alpha = -0.7;
    auto b = make_sac_agent(3, 2, cfg, 2);
    import_tensors(b, export_tensors(a));
    EXPECT_EQ(export_tensors(b), export_tensors(a));
    EXPECT_EQ(b.temp.log_alpha, -0.7);
    auto wrong = make_sac_agent(3, 2, SacConfig{}, 1);
    EXPECT_THROW(import_tensors(wrong, export_tensors(a)), numcore::ShapeError);
}
