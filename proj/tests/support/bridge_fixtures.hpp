#pragma once

#include "saci/bridge/remote_env.hpp"

#include <cmath>
#include <cstring>
#include <thread>

namespace saci::oracle {

using bridge::Millis;
using envs::Cause;
using numcore::Rng;
using numcore::Vector;

/// Scripted environment: obs and rewards are a pure function of the seed and step count.
class ScriptedEnv : public envs::Environment {
public:
    explicit ScriptedEnv(std::size_t obs_dim = 3, std::size_t reply_obs_dim = 3)
        : reply_obs_dim_(reply_obs_dim)
    {
        spec_ = {obs_dim, 2, 25, "scripted"};
    }

    const envs::EnvSpec& spec() const override { return spec_; }

    envs::ResetResult reset(std::uint64_t seed) override
    {
        rng_ = Rng(seed);
        t_ = 0;
        envs::ResetResult r;
        r.obs = observe();
        r.info.trial_kind = seed % 2 ? envs::TrialKind::stop : envs::TrialKind::go;
        return r;
    }

    envs::StepResult step(const Vector& action) override
    {
        ++t_;
        envs::StepResult r;
        r.obs = observe();
        r.components.base = action.sum() * 0.1 + numcore::uniform(rng_, -1.0, 1.0);
        r.components.time_penalty = -0.1;
        if (t_ % 7 == 0) {
            r.components.bomb_penalty = -1.0 / 3.0;
            r.info.bomb_present = true;
            r.info.bomb_center = std::array<double, 2>{0.1 * t_, std::sqrt(2.0)};
        }
        r.reward_raw = r.components.sum();
        const bool end = t_ >= 10 + (rng_() % 10);
        r.done = end || t_ >= spec_.max_steps;
        r.cause = end ? Cause::landed : (r.done ? Cause::timeout : Cause::running);
        return r;
    }

private:
    Vector observe()
    {
        Vector o(static_cast<Eigen::Index>(reply_obs_dim_));
        for (Eigen::Index i = 0; i < o.size(); ++i) {
            o(i) = numcore::uniform(rng_, -1.0, 1.0) * std::pow(10.0, static_cast<double>(i) - 1);
        }
        return o;
    }

    envs::EnvSpec spec_;
    std::size_t reply_obs_dim_;
    Rng rng_{0};
    std::size_t t_ = 0;
};

struct Served {
    std::unique_ptr<bridge::RemoteEnv> remote;
    std::thread server;
    std::size_t handled = 0;

    Served(std::unique_ptr<envs::Environment> env, Millis timeout = bridge::kDefaultTimeout)
        : local_(std::move(env))
    {
        auto [client, server_end] = bridge::make_loopback_pair();
        server_transport_ = std::move(server_end);
        server = std::thread([this] { handled = bridge::serve_env(*local_, *server_transport_); });
        remote = std::make_unique<bridge::RemoteEnv>(std::move(client), timeout);
    }
    ~Served()
    {
        remote.reset();
        if (server.joinable()) {
            server.join();
        }
    }

private:
    std::unique_ptr<envs::Environment> local_;
    std::unique_ptr<bridge::Transport> server_transport_;
};

struct Trace {
    std::vector<envs::ResetResult> resets;
    std::vector<envs::StepResult> steps;

    bool operator==(const Trace&) const = default;
};

inline Trace play(envs::Environment& env, std::size_t episodes, std::uint64_t seed)
{
    Trace trace;
    Rng rng(seed);
    const auto act_dim = static_cast<Eigen::Index>(env.spec().act_dim);
    for (std::size_t e = 0; e < episodes; ++e) {
        trace.resets.push_back(env.reset(seed * 1000 + e));
        for (;;) {
            Vector a(act_dim);
            for (Eigen::Index i = 0; i < act_dim; ++i) {
                a(i) = numcore::uniform(rng, -1.0, 1.0);
            }
            trace.steps.push_back(env.step(a));
            if (trace.steps.back().done) {
                break;
            }
        }
    }
    return trace;
}

inline double random_double(Rng& rng)
{
    switch (rng() % 4) {
    case 0:
        return numcore::uniform(rng, -1.0, 1.0);
    case 1:
        return std::ldexp(numcore::uniform(rng, -1.0, 1.0), static_cast<int>(rng() % 600) - 300);
    case 2:
        return static_cast<double>(static_cast<std::int64_t>(rng() % 2000) - 1000);
    default: {
        const std::uint64_t bits = rng();
        double d;
        std::memcpy(&d, &bits, sizeof(d));
        return std::isfinite(d) ? d : 0.5;
    }
    }
}

inline Vector random_vector(Rng& rng)
{
    Vector v(static_cast<Eigen::Index>(rng() % 6));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = random_double(rng);
    }
    return v;
}

inline envs::StepInfo random_info(Rng& rng)
{
    envs::StepInfo info;
    info.bomb_present = rng() % 2;
    if (info.bomb_present) {
        info.bomb_center = std::array<double, 2>{random_double(rng), random_double(rng)};
    }
    info.stuck = rng() % 2;
    info.trial_kind = rng() % 2 ? envs::TrialKind::stop : envs::TrialKind::go;
    return info;
}

inline bridge::WireMessage random_message(Rng& rng)
{
    const std::uint64_t seq = rng() % 3 == 0 ? rng() : rng() % 100;
    switch (rng() % 8) {
    case 0:
        return bridge::make_hello(seq);
    case 1:
        return bridge::make_spec(seq, {rng() % 100 + 1, rng() % 10 + 1, rng() % 5000,
                               rng() % 2 ? "lander" : "na\"me \xc3\xa9\\x"});
    case 2:
        return bridge::make_reset(seq, rng());
    case 3:
        return bridge::make_obs(seq, {random_vector(rng), random_info(rng)});
    case 4:
        return bridge::make_step(seq, random_vector(rng));
    case 5: {
        envs::StepResult r;
        r.obs = random_vector(rng);
        for (std::size_t k = 0; k < envs::kComponentNames.size(); ++k) {
            envs::component(r.components, k) = random_double(rng);
        }
        r.reward_raw = random_double(rng);
        r.done = rng() % 2;
        r.cause = envs::kAllCauses[rng() % envs::kAllCauses.size()];
        r.info = random_info(rng);
        return bridge::make_result(seq, r);
    }
    case 6:
        return bridge::make_close(seq);
    default:
        return bridge::make_error(seq, "bad thing " + std::to_string(rng()));
    }
}

} // namespace saci::oracle
