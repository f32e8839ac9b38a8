#pragma once

#include "saci/envs/env.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace saci::envs {

struct EnvOptions {
    double stop_prob = 0.5;  // bomb frequency (lander), stop-trial probability (stopgo, runner)
    bool include_fall = true;
    bool include_stuck = false;
    std::size_t max_steps = 0;  // 0 keeps the environment default
    std::size_t stall_limit = 60;
};

/// Built-in environments: "stopgo", "lander", "runner".
std::unique_ptr<Environment> make_env(const std::string& name, const EnvOptions& options);

std::vector<std::string> builtin_env_names();

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Per-step trace rows: step,obs...,action...,reward_raw,component_*,done,cause
void write_trace_header(std::ostream& out, std::size_t obs_dim, std::size_t act_dim);
void write_trace_row(std::ostream& out, std::size_t step, const Vector& obs, const Vector& action,
                     const StepResult& result);

/// Runs one episode with a fixed action source and writes its trace.
using ActionSource = std::function<Vector(const Vector& obs, const StepInfo& info)>;
void export_episode_trace(Environment& env, std::uint64_t seed, const ActionSource& policy,
                          std::ostream& out);

} // namespace saci::envs
