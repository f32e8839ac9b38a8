#include "acceptance.hpp"

#include "saci/envs/registry.hpp"
#include "saci/envs/shaping.hpp"
#include "saci/harness/trainer.hpp"
#include "saci/inhibitory/saci_agent.hpp"

#include "oracle.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace saci::acceptance {

using numcore::Matrix;
using numcore::Rng;
using numcore::Vector;
using oracle::flatten;
using oracle::numeric_gradient;
using oracle::relative_error;

namespace {

struct Shape {
    std::size_t obs = 0;
    std::size_t act = 0;
    std::vector<std::size_t> hidden;
};

// Critic input obs + act <= 8, hidden at most [16, 16], scalar output.
Shape random_shape(Rng& rng)
{
    Shape s;
    s.act = 1 + rng() % 2;
    s.obs = 1 + rng() % (8 - s.act);
    const std::vector<std::vector<std::size_t>> hidden{{8}, {16}, {8, 8}, {16, 16}, {16, 8}};
    s.hidden = hidden[rng() % hidden.size()];
    return s;
}

sac::SacBatch random_batch(const Shape& s, Eigen::Index n, Rng& rng)
{
    sac::SacBatch b;
    b.states = numcore::standard_normal(n, static_cast<Eigen::Index>(s.obs), rng);
    b.actions = numcore::standard_normal(n, static_cast<Eigen::Index>(s.act), rng)
                    .array()
                    .tanh()
                    .matrix();
    b.rewards = numcore::standard_normal(n, 1, rng).col(0);
    b.next_states = numcore::standard_normal(n, static_cast<Eigen::Index>(s.obs), rng);
    b.dones = Vector::Zero(n);
    b.dones(0) = 1.0;
    return b;
}

double scalar_gradient_error(double analytic, const std::function<double(double)>& f, double x)
{
    const double h = 1e-6;
    const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
    return std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-12});
}

} // namespace

Outcome gradient_oracle(const Context&)
{
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240601);
    double worst[5] = {};
    const char* names[5] = {"J_Q", "J_Qk", "J_pi", "J'_pi", "J_alpha"};
    constexpr int kTrials = 40;
    for (int trial = 0; trial < kTrials; ++trial) {
        const auto s = random_shape(rng);
        const auto o = static_cast<Eigen::Index>(s.obs);
        const auto a = static_cast<Eigen::Index>(s.act);
        const std::uint64_t seed = rng();
        auto policy = sac::make_policy(s.obs, s.act, s.hidden, seed);
        auto twin = sac::make_twin_q(s.obs, s.act, s.hidden, seed + 1);
        auto twin_i = sac::make_twin_q(s.obs, s.act, s.hidden, seed + 2);
        const auto batch = random_batch(s, 6, rng);
        const Matrix next_noise = numcore::standard_normal(6, a, rng);
        const double alpha = numcore::uniform(rng, 0.01, 1.0);
        const double alpha_i = numcore::uniform(rng, 0.01, 1.0);

        // critic losses are differentiated with the bootstrap targets frozen
        const auto jq = sac::q_loss(twin, batch, policy, alpha, 0.99, next_noise);
        const auto frozen = [&] { return sac::q_loss_against(twin, batch, jq.targets).loss; };
        auto e = std::max(relative_error(flatten(jq.grad_q1), numeric_gradient(twin.q1, frozen)),
                          relative_error(flatten(jq.grad_q2), numeric_gradient(twin.q2, frozen)));
        worst[0] = std::max(worst[0], e);

        const auto jqk = inhibitory::q_loss_branch(twin_i, batch, policy, alpha_i, 0.99, next_noise);
        const auto frozen_k = [&] { return sac::q_loss_against(twin_i, batch, jqk.targets).loss; };
        e = std::max(relative_error(flatten(jqk.grad_q1), numeric_gradient(twin_i.q1, frozen_k)),
                     relative_error(flatten(jqk.grad_q2), numeric_gradient(twin_i.q2, frozen_k)));
        worst[1] = std::max(worst[1], e);

        const Matrix sr = numcore::standard_normal(5, o, rng);
        const Matrix nr = numcore::standard_normal(5, a, rng);
        const auto jpi = sac::policy_loss(policy, twin, sr, alpha, nr);
        const auto pi_loss = [&] { return sac::policy_loss(policy, twin, sr, alpha, nr).loss; };
        worst[2] = std::max(worst[2],
                            relative_error(flatten(jpi.grads), numeric_gradient(policy.net, pi_loss)));

        const Matrix si = numcore::standard_normal(3, o, rng);
        const Matrix ni = numcore::standard_normal(3, a, rng);
        const auto composite = [&] {
            return inhibitory::composite_policy_loss(policy, twin, twin_i, sr, si, alpha, alpha_i,
                                                     nr, ni);
        };
        const auto jc = composite();
        worst[3] = std::max(worst[3], relative_error(flatten(jc->grads),
                                                     numeric_gradient(policy.net, [&] {
                                                         return composite()->loss;
                                                     })));

        sac::Temperature t;
        t.log_alpha = std::log(alpha);
        const Vector lp = numcore::standard_normal(8, 1, rng).col(0);
        const auto ja = sac::alpha_loss(t, lp);
        worst[4] = std::max(worst[4], scalar_gradient_error(
                                          ja.grad_log_alpha,
                                          [&](double x) {
                                              auto u = t;
                                              u.log_alpha = x;
                                              return sac::alpha_loss(u, lp).loss;
                                          },
                                          t.log_alpha));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream detail;
    bool pass = secs < 60.0;
    for (int i = 0; i < 5; ++i) {
        detail << names[i] << " " << worst[i] << "; ";
        pass = pass && worst[i] < 1e-4;
    }
    detail << kTrials << " random networks, " << secs << " s";
    return {pass, detail.str()};
}

Outcome squashed_density(const Context&)
{
    Rng rng(3);
    double worst_integral = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        auto policy = sac::make_policy(3, 1, {8}, 100 + static_cast<std::uint64_t>(trial));
        policy.net.biases.back()(0) = numcore::uniform(rng, -1.5, 1.5);
        policy.net.biases.back()(1) = numcore::uniform(rng, -1.5, 0.5);
        const Vector s = numcore::standard_normal(3, 1, rng).col(0);
        const auto e0 = sac::evaluate_policy(policy, s.transpose(), Matrix::Zero(1, 1));
        const double mu = e0.mean(0, 0);
        const double sigma = std::exp(e0.log_std(0, 0));
        // trapezoid in u-space: p(a) da with a = tanh(u), da = (1 - a^2) du
        const int n = 200000;
        const double lo = mu - 12.0 * sigma;
        const double du = 24.0 * sigma / n;
        double total = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double u = lo + i * du;
            const auto x = sac::sample_action(policy, s, Vector::Constant(1, (u - mu) / sigma));
            total += (i == 0 || i == n ? 0.5 : 1.0) * std::exp(x.log_prob) *
                     (1.0 - x.action(0) * x.action(0)) * du;
        }
        worst_integral = std::max(worst_integral, std::abs(total - 1.0));
    }

    auto policy = sac::make_policy(1, 1, {4}, 3);
    for (auto& w : policy.net.weights) {
        w.setZero();
    }
    const double mu = 0.3;
    const double sigma = 0.6;
    policy.net.biases.back() << mu, std::log(sigma);
    const Vector s = Vector::Zero(1);
    const auto density = [&](double a) {
        const auto x = sac::sample_action(policy, s, Vector::Constant(1, (std::atanh(a) - mu) / sigma));
        return std::exp(x.log_prob);
    };
    double mode = 0.0;
    double peak = 0.0;
    for (int i = -99990; i <= 99990; ++i) {
        const double a = i / 100000.0;
        if (const double p = density(a); p > peak) {
            peak = p;
            mode = a;
        }
    }
    Rng mc_rng(77);
    std::normal_distribution<double> normal;
    const double h = 0.01;
    const std::size_t n = 1000000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        hits += std::abs(std::tanh(mu + sigma * normal(mc_rng)) - mode) <= h;
    }
    const double mc = static_cast<double>(hits) / (static_cast<double>(n) * 2.0 * h);
    const double mc_error = std::abs(mc / peak - 1.0);
    std::ostringstream detail;
    detail << "max |integral - 1| " << worst_integral << " over 10 policies; MC/analytic density at mode "
           << mc / peak << " (1e6 samples)";
    return {worst_integral <= 0.01 && mc_error <= 0.02, detail.str()};
}

Outcome partition_exactness(const Context&)
{
    std::size_t violations = 0;
    std::size_t checked = 0;

    // labels from the proximity rule on lander states, kept in a side table by push index
    auto env = envs::make_env("lander", {});
    Rng rng(5);
    for (const std::size_t capacity : {std::size_t{1000000}, std::size_t{4096}}) {
        inhibitory::ReplayPartition p(capacity);
        std::vector<bool> label;
        envs::ResetResult reset = env->reset(rng());
        Vector state = reset.obs;
        envs::StepInfo info = reset.info;
        std::size_t inhibitory = 0;
        while (label.size() < 100000) {
            Vector action(2);
            action << numcore::uniform(rng, -1.0, 1.0), numcore::uniform(rng, -1.0, 1.0);
            const auto r = env->step(action);
            const bool is_i = envs::lander_proximity_rule(state, info);
            inhibitory::Transition t;
            t.state = state;
            t.action = action;
            t.branch = is_i ? inhibitory::Branch::I : inhibitory::Branch::R;
            t.next_state = r.obs;
            t.done = r.done;
            t.inhibitor_action = static_cast<double>(label.size());
            label.push_back(is_i);
            inhibitory += is_i;
            p.push(std::move(t));
            if (r.done) {
                reset = env->reset(rng());
                state = reset.obs;
                info = reset.info;
            } else {
                state = r.obs;
                info = r.info;
            }
        }
        for (const auto& t : p.d_r().slots()) {
            violations += label[static_cast<std::size_t>(t.inhibitor_action)] ||
                          t.branch != inhibitory::Branch::R;
            ++checked;
        }
        for (const auto& t : p.d_i().slots()) {
            violations += !label[static_cast<std::size_t>(t.inhibitor_action)] ||
                          t.branch != inhibitory::Branch::I;
            ++checked;
        }
        if (inhibitory == 0) {
            return {false, "no inhibitory states in the synthetic run"};
        }
    }

    // the trainer's own labelling on StopGo; the zone rule is visible in the observation
    harness::TrainConfig cfg;
    cfg.env = "stopgo";
    cfg.episodes = 1000000;
    cfg.max_total_steps = 100000;
    cfg.max_steps = 300;
    cfg.hidden = {8};
    cfg.batch_size = 8;
    cfg.shaping = harness::Shaping::none;
    cfg.seed = 3;
    harness::Trainer trainer(cfg);
    trainer.run();
    const auto* part = trainer.partition();
    for (const auto& t : part->d_r().slots()) {
        violations += t.state(2) != envs::kDummyObs || t.branch != inhibitory::Branch::R;
    }
    for (const auto& t : part->d_i().slots()) {
        violations += t.state(2) == envs::kDummyObs || t.branch != inhibitory::Branch::I;
    }
    checked += part->total();
    std::ostringstream detail;
    detail << violations << " violations over " << checked << " stored transitions (two synthetic "
           << "runs of 1e5 pushes incl. wrap-around, plus " << part->total() << " from training, "
           << part->fill(inhibitory::Branch::I) << " inhibitory)";
    const bool complete = part->total() == trainer.total_steps();
    return {violations == 0 && complete && part->fill(inhibitory::Branch::I) > 0, detail.str()};
}

Outcome sac_equivalence(const Context&)
{
    // StopGo with stop trials disabled never shows a zone, so D_I stays empty
    harness::TrainConfig cfg;
    cfg.env = "stopgo";
    cfg.stop_prob = 0.0;
    cfg.shaping = harness::Shaping::none;
    cfg.max_steps = 250;
    cfg.episodes = 1000000;
    cfg.max_total_steps = 5000;
    cfg.seed = 8;
    auto sac_cfg = cfg;
    sac_cfg.algo = harness::Algo::sac;
    cfg.algo = harness::Algo::saci;
    harness::Trainer sac(sac_cfg);
    harness::Trainer saci(cfg);
    std::size_t compared = 0;
    while (!sac.finished() || !saci.finished()) {
        if (sac.finished() != saci.finished()) {
            return {false, "runs ended at different steps"};
        }
        const auto a = sac.run_episode();
        const auto b = saci.run_episode();
        const auto& x = *sac.sac_agent();
        const auto& y = *saci.saci_agent();
        const bool same = a.step == b.step && a.episode_reward_raw == b.episode_reward_raw &&
                          a.alpha_r == b.alpha_r && a.loss_q_r == b.loss_q_r &&
                          a.loss_pi == b.loss_pi && flatten(x.policy.net) == flatten(y.policy.net) &&
                          flatten(x.twin.q1) == flatten(y.twin_r.q1) &&
                          flatten(x.twin.q2) == flatten(y.twin_r.q2) &&
                          flatten(x.twin.q1_target) == flatten(y.twin_r.q1_target) &&
                          flatten(x.twin.q2_target) == flatten(y.twin_r.q2_target) &&
                          x.temp.log_alpha == y.temp_r.log_alpha;
        ++compared;
        if (!same) {
            return {false, "diverged in episode " + std::to_string(a.episode) + " (step " +
                               std::to_string(a.step) + ")"};
        }
        if (saci.partition()->fill(inhibitory::Branch::I) != 0) {
            return {false, "D_I received a transition"};
        }
    }
    std::ostringstream detail;
    detail << "policy, twin_r, targets and alpha_R bit-identical after each of " << compared
           << " episodes, " << saci.total_steps() << " steps";
    return {saci.total_steps() >= 5000, detail.str()};
}

Outcome temperature_dynamics(const Context&)
{
    // entropy -1 sits above H0 = -3 and entropy -5 below it
    std::ostringstream detail;
    bool pass = true;
    for (const bool r_above : {true, false}) {
        inhibitory::SaciConfig cfg;
        cfg.base.hidden = {8};
        auto agent = inhibitory::make_saci_agent(2, 1, cfg, 1);
        const Vector lp_r = Vector::Constant(64, r_above ? 1.0 : 5.0);
        const Vector lp_i = Vector::Constant(64, r_above ? 5.0 : 1.0);
        std::size_t bad_r = 0;
        std::size_t bad_i = 0;
        const double start_r = agent.temp_r.alpha();
        const double start_i = agent.temp_i.alpha();
        for (int step = 0; step < 500; ++step) {
            const double prev_r = agent.temp_r.alpha();
            const double prev_i = agent.temp_i.alpha();
            sac::apply_alpha_step(agent.temp_r, inhibitory::dual_alpha_loss(agent.temp_r, lp_r),
                                  cfg.base.lr);
            sac::apply_alpha_step(agent.temp_i, inhibitory::dual_alpha_loss(agent.temp_i, lp_i),
                                  cfg.base.lr);
            bad_r += r_above ? agent.temp_r.alpha() >= prev_r : agent.temp_r.alpha() <= prev_r;
            bad_i += r_above ? agent.temp_i.alpha() <= prev_i : agent.temp_i.alpha() >= prev_i;
        }
        pass = pass && bad_r == 0 && bad_i == 0;
        detail << (r_above ? "R above/I below: " : "R below/I above: ") << "alpha_R " << start_r
               << " -> " << agent.temp_r.alpha() << ", alpha_I " << start_i << " -> "
               << agent.temp_i.alpha() << " (" << bad_r + bad_i << " non-monotone steps); ";
    }
    return {pass, detail.str()};
}

} // namespace saci::acceptance
