#include "saci/envs/lander_bomb.hpp"
#include "saci/envs/registry.hpp"
#include "saci/envs/ridge_runner.hpp"
#include "saci/envs/shaping.hpp"
#include "saci/envs/stopgo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace saci;
using namespace saci::envs;
using numcore::Rng;

namespace {

Vector random_action(std::size_t dim, Rng& rng)
{
    Vector a(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a(i) = numcore::uniform(rng, -1.0, 1.0);
    }
    return a;
}

std::vector<StepResult> rollout(Environment& env, std::uint64_t seed, std::uint64_t action_seed)
{
    Rng rng(action_seed);
    env.reset(seed);
    std::vector<StepResult> out;
    for (;;) {
        out.push_back(env.step(random_action(env.spec().act_dim, rng)));
        if (out.back().done) {
            return out;
        }
    }
}

std::unique_ptr<Environment> env_named(const std::string& name, double stop_prob = 0.5)
{
    EnvOptions o;
    o.stop_prob = stop_prob;
    o.include_stuck = name == "runner";
    return make_env(name, o);
}

bool zone_slots_dummy(const std::string& name, const Vector& obs)
{
    const Eigen::Index first = name == "stopgo" ? 2 : LanderObs::zone_ul_x;
    for (Eigen::Index i = first; i < first + (name == "stopgo" ? 2 : 4); ++i) {
        if (obs(i) != kDummyObs) {
            return false;
        }
    }
    return true;
}

double stop_fraction(Environment& env, int n)
{
    int stops = 0;
    for (int s = 0; s < n; ++s) {
        stops += env.reset(static_cast<std::uint64_t>(s) * 7919 + 1).info.trial_kind == TrialKind::stop;
    }
    return static_cast<double>(stops) / n;
}

} // namespace

class AllEnvs : public ::testing::TestWithParam<std::string> {};

TEST_P(AllEnvs, SpecIsSane)
{
    const auto env = env_named(GetParam());
    EXPECT_GE(env->spec().obs_dim, 1u);
    EXPECT_GE(env->spec().act_dim, 1u);
    EXPECT_GE(env->spec().max_steps, 1u);
    EXPECT_EQ(env->spec().name, GetParam());
    EXPECT_EQ(static_cast<std::size_t>(env->reset(0).obs.size()), env->spec().obs_dim);
}

TEST_P(AllEnvs, SameSeedAndActionsGiveIdenticalResults)
{
    auto a = env_named(GetParam());
    auto b = env_named(GetParam());
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        EXPECT_EQ(a->reset(seed), b->reset(seed));
        EXPECT_EQ(rollout(*a, seed, seed + 10), rollout(*b, seed, seed + 10));
    }
}

TEST_P(AllEnvs, RewardIsSumOfComponentsAndEpisodesAreBounded)
{
    auto env = env_named(GetParam());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto trace = rollout(*env, seed, 100 + seed);
        EXPECT_LE(trace.size(), env->spec().max_steps);
        for (std::size_t t = 0; t < trace.size(); ++t) {
            const auto& r = trace[t];
            ASSERT_EQ(r.reward_raw, r.components.sum());
            ASSERT_EQ(r.info.bomb_present, r.info.bomb_center.has_value());
            ASSERT_EQ(r.done, t + 1 == trace.size());
            ASSERT_EQ(r.done, r.cause != Cause::running);
            ASSERT_EQ(static_cast<std::size_t>(r.obs.size()), env->spec().obs_dim);
            if (GetParam() != "runner") {
                ASSERT_EQ(zone_slots_dummy(GetParam(), r.obs), !r.info.bomb_present);
            }
        }
    }
}

TEST_P(AllEnvs, StepAfterDoneAndWrongActionSizeAreUsageErrors)
{
    auto env = env_named(GetParam());
    EXPECT_THROW(env->step(Vector::Zero(env->spec().act_dim)), UsageError);
    env->reset(3);
    EXPECT_THROW(env->step(Vector::Zero(env->spec().act_dim + 1)), UsageError);
    rollout(*env, 3, 4);
    EXPECT_THROW(env->step(Vector::Zero(env->spec().act_dim)), UsageError);
}

TEST_P(AllEnvs, ZeroStopProbabilityGivesOnlyGoTrials)
{
    auto env = env_named(GetParam(), 0.0);
    EXPECT_EQ(stop_fraction(*env, 2000), 0.0);
}

TEST_P(AllEnvs, StopFractionMatchesProbability)
{
    auto half = env_named(GetParam(), 0.5);
    const double f = stop_fraction(*half, 10000);
    EXPECT_GE(f, 0.48);
    EXPECT_LE(f, 0.52);
    auto hard = env_named(GetParam(), 0.9);
    const double h = stop_fraction(*hard, 10000);
    EXPECT_GE(h, 0.88);
    EXPECT_LE(h, 0.92);
}

INSTANTIATE_TEST_SUITE_P(Builtin, AllEnvs, ::testing::Values("stopgo", "lander", "runner"));

TEST(Registry, UnknownNameThrows)
{
    EXPECT_THROW(make_env("pong", {}), std::invalid_argument);
    EXPECT_EQ(builtin_env_names(), (std::vector<std::string>{"stopgo", "lander", "runner"}));
}

TEST(Registry, MaxStepsOverride)
{
    EnvOptions o;
    o.max_steps = 7;
    for (const auto& name : builtin_env_names()) {
        auto env = make_env(name, o);
        EXPECT_EQ(env->spec().max_steps, 7u);
        EXPECT_LE(rollout(*env, 1, 2).size(), 7u);
    }
    EXPECT_EQ(make_env("lander", {})->spec().max_steps, 1000u);
    EXPECT_EQ(make_env("stopgo", {})->spec().max_steps, 1000u);
    EXPECT_EQ(make_env("runner", {})->spec().max_steps, 2000u);
}

TEST(Registry, FormatDoubleRoundTrips)
{
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = numcore::uniform(rng, -1e6, 1e6) * std::pow(10.0, i % 40 - 20);
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(-0.1), "-0.1");
}

TEST(Registry, TraceExportHeaderAndRows)
{
    StopGo1D env;
    std::ostringstream out;
    export_episode_trace(env, 5, [](const Vector&, const StepInfo&) { return Vector::Ones(1); }, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "step,obs_0,obs_1,obs_2,obs_3,action_0,reward_raw,component_base,"
              "component_time_penalty,component_bomb_penalty,component_shaping,component_stuck,"
              "component_fall,done,cause");
    std::string line;
    std::size_t rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        ++rows;
        last = line;
    }
    EXPECT_GT(rows, 1u);
    EXPECT_NE(last.find(",1,"), std::string::npos);
}

TEST(Shaping, ProxyValues)
{
    EXPECT_EQ(bomb_proxy_shaping(0.3), 0.0);
    EXPECT_NEAR(bomb_proxy_shaping(0.2), -1.0, 1e-12);
    EXPECT_NEAR(bomb_proxy_shaping(0.0), -81.0, 1e-12);
}

TEST(Shaping, ConservativeValues)
{
    EXPECT_NEAR(conservative_terms(0.0, 0.05, 0, 0, 0, 0).r_x, -9.23, 1e-12);
    EXPECT_NEAR(conservative_terms(0.1, 0.05, 0, 0, 0, 0).r_x, -1.0 / 0.7 + 0.77, 1e-12);
    EXPECT_NEAR(conservative_terms(0.1, 0.05, 0, 0, 0, 0).r_x, -0.6586, 1e-4);
    const auto t = conservative_terms(0.3, 0.05, 0, 0, 0, 0);
    EXPECT_EQ(t.r_y + t.r_angle + t.r_vel, 0.0);
    const auto u = conservative_terms(0.0, 0.15, 0.2, 0.1, -0.1, 0.3);
    EXPECT_NEAR(u.r_y, -0.03, 1e-12);
    EXPECT_NEAR(u.r_angle, -0.04, 1e-12);
    EXPECT_NEAR(u.r_vel, -2.0 * (0.01 + 0.01 + 0.09), 1e-12);
}

TEST(Shaping, StuckExamples)
{
    const double six[6] = {-0.1, -0.1, -0.1, -0.1, -0.1, -0.1};
    EXPECT_NEAR(stuck_reward(six, 6), -0.6, 1e-12);
    const double pos[6] = {0.1, 0.1, 0.1, 0.0, 0.0, 0.0};
    EXPECT_EQ(stuck_reward(pos, 6), 0.0);
    const double pad[1] = {-0.2};
    EXPECT_EQ(stuck_reward(pad, 1), -0.2);
    const double eight[8] = {-50, -50, 0, 0, 0, 0, 0, -0.2};
    EXPECT_EQ(stuck_reward(eight, 8), -0.2);
}

// Sum of the last six entries, oldest first, zero-padded; kept only when negative.
double brute_force_stuck(const std::vector<double>& trace, std::size_t t)
{
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t back = 5 - k;
        s += t >= back ? trace[t - back] : 0.0;
    }
    return s < 0.0 ? s : 0.0;
}

TEST(Shaping, StuckWindowMatchesBruteForceExactly)
{
    Rng rng(12);
    std::size_t violations = 0;
    for (int trace_id = 0; trace_id < 10000; ++trace_id) {
        const std::size_t len = 1 + static_cast<std::size_t>(rng() % 40);
        std::vector<double> trace(len);
        for (auto& r : trace) {
            r = (rng() % 3 == 0) ? -0.1 : numcore::uniform(rng, -2.0, 1.0);
        }
        StuckWindow w;
        for (std::size_t t = 0; t < len; ++t) {
            w.push(trace[t]);
            violations += w.value() != brute_force_stuck(trace, t);
            violations += stuck_reward(trace.data(), t + 1) != brute_force_stuck(trace, t);
        }
    }
    EXPECT_EQ(violations, 0u);
}

TEST(Shaping, ProximityRuleImpliesNonPositiveProxy)
{
    Rng rng(3);
    std::size_t fired = 0;
    for (int i = 0; i < 100000; ++i) {
        Vector obs = Vector::Constant(LanderObs::size, kDummyObs);
        obs(LanderObs::x) = numcore::uniform(rng, -1, 1);
        obs(LanderObs::y) = numcore::uniform(rng, 0, 1.4);
        StepInfo info;
        info.bomb_present = true;
        info.bomb_center = std::array<double, 2>{numcore::uniform(rng, -0.2, 0.2),
                                                 numcore::uniform(rng, 0.1, 0.5)};
        if (lander_proximity_rule(obs, info)) {
            ++fired;
            const double d = std::hypot(obs(0) - (*info.bomb_center)[0], obs(1) - (*info.bomb_center)[1]);
            ASSERT_LT(d, 0.3);
            ASSERT_LE(bomb_proxy_shaping(d), 0.0);
        }
    }
    EXPECT_GT(fired, 100u);
}

TEST(Shaping, RulesNeedAPresentBomb)
{
    const Vector obs = Vector::Zero(LanderObs::size);
    StepInfo none;
    EXPECT_FALSE(lander_proximity_rule(obs, none));
    EXPECT_FALSE(lander_conservative_rule(obs, none));
    StepInfo bomb;
    bomb.bomb_present = true;
    bomb.bomb_center = std::array<double, 2>{0.1, -0.5};
    EXPECT_TRUE(lander_conservative_rule(obs, bomb));
    bomb.bomb_center = std::array<double, 2>{0.3, -0.5};
    EXPECT_FALSE(lander_conservative_rule(obs, bomb));
}

TEST(Lander, InsideBombZoneEndsWithBombPenalty)
{
    LanderBomb env(LanderBombConfig{0.0, 1000});
    env.reset(1);
    env.force_bomb(0.0, 0.5);
    LanderBomb::Body b;
    b.x = 0.0;
    b.y = 0.5;
    env.set_body(b);
    const auto r = env.step(Vector::Zero(2));
    EXPECT_TRUE(r.done);
    EXPECT_EQ(r.cause, Cause::hit_bomb);
    EXPECT_EQ(r.components.bomb_penalty, -150.0);
}

TEST(Lander, ZeroThrustCrashesAndEveryFramePaysTimePenalty)
{
    LanderBomb env(LanderBombConfig{0.0, 1000});
    env.reset(2);
    StepResult r;
    do {
        r = env.step(Vector::Zero(2));
        ASSERT_EQ(r.components.time_penalty, -0.1);
    } while (!r.done);
    EXPECT_EQ(r.cause, Cause::crashed);
    EXPECT_EQ(r.components.base, -100.0);
}

TEST(Lander, BombAppearsInAltitudeBandWithCenterInRange)
{
    LanderBomb env(LanderBombConfig{1.0, 1000});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        env.reset(seed);
        double prev_y = env.body().y;
        for (;;) {
            // hover-ish descent so the trigger band is crossed slowly
            const auto r = env.step(Vector::Constant(2, 0.0));
            if (r.info.bomb_present) {
                EXPECT_LE(env.body().y, 1.1 + 1e-12);
                EXPECT_GE(prev_y, 0.9 - 1e-12);
                const auto c = *r.info.bomb_center;
                EXPECT_GE(c[0], -0.2);
                EXPECT_LE(c[0], 0.2);
                EXPECT_GE(c[1], 0.1);
                EXPECT_LE(c[1], 0.5);
                EXPECT_NEAR(r.obs(LanderObs::zone_br_x) - r.obs(LanderObs::zone_ul_x), 0.2, 1e-12);
                break;
            }
            ASSERT_FALSE(r.done);
            prev_y = env.body().y;
        }
    }
}

TEST(Lander, DescentPotentialIsAbout120)
{
    LanderBomb env(LanderBombConfig{0.0, 1000});
    env.reset(0);
    const double top = env.potential();
    env.set_body(LanderBomb::Body{});
    EXPECT_NEAR(env.potential() - top, 120.0, 3.0);
}

TEST(Lander, StartsNearTopCentre)
{
    LanderBomb env;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto r = env.reset(s);
        EXPECT_NEAR(r.obs(LanderObs::x), 0.0, 0.1);
        EXPECT_EQ(r.obs(LanderObs::y), LanderBomb::kTopY);
        EXPECT_FALSE(r.info.bomb_present);
    }
}

TEST(StopGo, GoTrialReachesGoalForFullThrottle)
{
    StopGo1D env(StopGoConfig{0.0, 1000, 15});
    env.reset(1);
    StepResult r;
    double total = 0.0;
    std::size_t steps = 0;
    do {
        r = env.step(Vector::Ones(1));
        total += r.reward_raw;
        ++steps;
    } while (!r.done);
    EXPECT_EQ(r.cause, Cause::finished);
    EXPECT_EQ(r.components.base, 100.0);
    EXPECT_NEAR(total, 100.0 - 0.1 * static_cast<double>(steps), 1e-9);
}

TEST(StopGo, EnteringZoneEndsWithPenalty)
{
    StopGo1D env(StopGoConfig{1.0, 1000, 15});
    env.reset(4);
    StepResult r;
    do {
        r = env.step(Vector::Ones(1));
    } while (!r.done);
    EXPECT_EQ(r.cause, Cause::hit_bomb);
    EXPECT_EQ(r.components.bomb_penalty, -150.0);
}

TEST(StopGo, ScriptedBrakingBeatsRandomOnStopTrials)
{
    StopGo1D env(StopGoConfig{1.0, 1000, 15});
    Rng rng(8);
    double scripted = 0.0;
    double random = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto r = env.reset(s);
        Vector obs = r.obs;
        StepResult step;
        do {
            // full throttle, full brake while a zone is shown
            step = env.step(Vector::Constant(1, obs(2) == kDummyObs ? 1.0 : -1.0));
            scripted += step.reward_raw;
            obs = step.obs;
        } while (!step.done);
        env.reset(s);
        do {
            step = env.step(random_action(1, rng));
            random += step.reward_raw;
        } while (!step.done);
    }
    EXPECT_GE((scripted - random) / 100.0, 100.0);
}

TEST(StopGo, ZoneAppearsOnlyOnStopTrials)
{
    StopGo1D env(StopGoConfig{0.5, 1000, 15});
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto kind = env.reset(s).info.trial_kind;
        bool seen = false;
        StepResult r;
        do {
            r = env.step(Vector::Ones(1));
            seen = seen || r.info.bomb_present;
        } while (!r.done);
        EXPECT_EQ(seen, kind == TrialKind::stop);
    }
}

TEST(Runner, FallWithoutFallPenalty)
{
    RidgeRunner env(RidgeRunnerConfig{0.0, false, false, 2000, 60});
    env.reset(1);
    StepResult r;
    do {
        // pure hip asymmetry tips the hull over
        r = env.step((Vector(4) << 1.0, 0.0, -1.0, 0.0).finished());
    } while (!r.done);
    EXPECT_EQ(r.cause, Cause::fell);
    EXPECT_EQ(r.components.fall, 0.0);
    RidgeRunner with_fall(RidgeRunnerConfig{0.0, true, false, 2000, 60});
    with_fall.reset(1);
    do {
        r = with_fall.step((Vector(4) << 1.0, 0.0, -1.0, 0.0).finished());
    } while (!r.done);
    EXPECT_EQ(r.components.fall, -100.0);
}

TEST(Runner, StationaryAgainstBlockAccumulatesStuckPenalty)
{
    RidgeRunner env(RidgeRunnerConfig{0.0, true, true, 2000, 60});
    env.reset(0);
    env.set_obstacles({Obstacle{Obstacle::Kind::block, 0.05, 0.4, 0.5}});
    const Vector push = (Vector(4) << 1.0, -1.0, 1.0, -1.0).finished();
    std::vector<double> base;
    StepResult r;
    std::size_t blocked = 0;
    for (int t = 0; t < 12 && !r.done; ++t) {
        r = env.step(push);
        base.push_back(r.components.base);
        if (r.components.base == -0.1) {
            ++blocked;
        } else {
            blocked = 0;
        }
        EXPECT_EQ(r.components.stuck, brute_force_stuck(base, base.size() - 1));
        EXPECT_EQ(r.info.stuck, r.components.stuck < 0.0);
        if (blocked >= 6) {
            EXPECT_NEAR(r.components.stuck, -0.6, 1e-12);
        }
    }
    EXPECT_GE(blocked, 6u);
}

TEST(Runner, ObservationHidesTrackPosition)
{
    RidgeRunner env(RidgeRunnerConfig{0.0, true, false, 2000, 60});
    env.reset(3);
    const auto first = env.step(Vector::Zero(4)).obs;
    // flat track: moving forward with identical dynamics state leaves the sensors unchanged
    EXPECT_EQ(first(8), 1.0);
    EXPECT_EQ(first(9), 0.0);
    EXPECT_EQ(first(10), 1.0);
    EXPECT_EQ(first(11), 0.0);
}

TEST(Runner, HardcoreTracksHaveObstacles)
{
    RidgeRunner env(RidgeRunnerConfig{1.0, true, false, 2000, 60});
    for (std::uint64_t s = 0; s < 50; ++s) {
        env.reset(s);
        EXPECT_FALSE(env.obstacles().empty());
    }
    RidgeRunner easy(RidgeRunnerConfig{0.0, true, false, 2000, 60});
    easy.reset(0);
    EXPECT_TRUE(easy.obstacles().empty());
}
