#include "saci/envs/registry.hpp"

#include "saci/envs/lander_bomb.hpp"
#include "saci/envs/ridge_runner.hpp"
#include "saci/envs/stopgo.hpp"

#include <charconv>
#include <ostream>

namespace saci::envs {

std::unique_ptr<Environment> make_env(const std::string& name, const EnvOptions& options)
{
    if (name == "stopgo") {
        StopGoConfig cfg;
        cfg.stop_prob = options.stop_prob;
        if (options.max_steps != 0) {
            cfg.max_steps = options.max_steps;
        }
        return std::make_unique<StopGo1D>(cfg);
    }
    if (name == "lander") {
        LanderBombConfig cfg;
        cfg.bomb_freq = options.stop_prob;
        if (options.max_steps != 0) {
            cfg.max_steps = options.max_steps;
        }
        return std::make_unique<LanderBomb>(cfg);
    }
    if (name == "runner") {
        RidgeRunnerConfig cfg;
        cfg.stop_prob = options.stop_prob;
        cfg.include_fall = options.include_fall;
        cfg.include_stuck = options.include_stuck;
        cfg.stall_limit = options.stall_limit;
        if (options.max_steps != 0) {
            cfg.max_steps = options.max_steps;
        }
        return std::make_unique<RidgeRunner>(cfg);
    }
    throw std::invalid_argument("unknown environment '" + name + "'");
}

std::vector<std::string> builtin_env_names()
{
    return {"stopgo", "lander", "runner"};
}

std::string format_double(double value)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_trace_header(std::ostream& out, std::size_t obs_dim, std::size_t act_dim)
{
    out << "step";
    for (std::size_t i = 0; i < obs_dim; ++i) {
        out << ",obs_" << i;
    }
    for (std::size_t i = 0; i < act_dim; ++i) {
        out << ",action_" << i;
    }
    out << ",reward_raw";
    for (auto name : kComponentNames) {
        out << ",component_" << name;
    }
    out << ",done,cause\n";
}

void write_trace_row(std::ostream& out, std::size_t step, const Vector& obs, const Vector& action,
                     const StepResult& result)
{
    out << step;
    for (Eigen::Index i = 0; i < obs.size(); ++i) {
        out << ',' << format_double(obs(i));
    }
    for (Eigen::Index i = 0; i < action.size(); ++i) {
        out << ',' << format_double(action(i));
    }
    out << ',' << format_double(result.reward_raw);
    for (std::size_t i = 0; i < kComponentNames.size(); ++i) {
        out << ',' << format_double(component(result.components, i));
    }
    out << ',' << (result.done ? 1 : 0) << ',' << to_string(result.cause) << '\n';
}

void export_episode_trace(Environment& env, std::uint64_t seed, const ActionSource& policy,
                          std::ostream& out)
{
    const auto& spec = env.spec();
    write_trace_header(out, spec.obs_dim, spec.act_dim);
    auto start = env.reset(seed);
    Vector obs = start.obs;
    StepInfo info = start.info;
    for (std::size_t t = 0; t < spec.max_steps; ++t) {
        const Vector action = policy(obs, info);
        const auto result = env.step(action);
        // row carries the observation the action was chosen from
        write_trace_row(out, t, obs, action, result);
        if (result.done) {
            break;
        }
        obs = result.obs;
        info = result.info;
    }
}

} // namespace saci::envs
