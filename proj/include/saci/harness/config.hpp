#pragma once

#include "saci/envs/registry.hpp"
#include "saci/inhibitory/saci_agent.hpp"

#include <string>
#include <vector>

namespace saci::harness {

enum class Algo { sac, saci };
enum class Shaping { none, proxy, conservative };

std::string_view to_string(Algo a);
std::string_view to_string(Shaping s);

struct TrainConfig {
    // [run]
    Algo algo = Algo::saci;
    std::string env = "lander";
    std::size_t episodes = 2000;
    std::size_t max_total_steps = 0;  // 0: episode budget only
    std::uint64_t seed = 0;
    std::size_t random_steps = 0;     // uniform random actions before the policy takes over

    // [agent]
    std::size_t batch_size = 64;
    double lr = 5e-4;
    double gamma = 0.99;
    double tau = 1e-3;
    double target_entropy = -3.0;
    std::vector<std::size_t> hidden{256};
    std::size_t replay_capacity = 1000000;

    // [env]
    double stop_prob = 0.5;
    std::size_t max_steps = 0;
    bool include_fall = true;
    bool include_stuck = false;
    std::size_t stall_limit = 60;

    // [saci]
    Shaping shaping = Shaping::proxy;
    inhibitory::InhibitionMode inhibition = inhibitory::InhibitionMode::rule;
    bool episodic_memory = true;
    bool dual_alpha = true;
    std::size_t warmup_episodes = 0;
    double inhibitor_target_entropy = -3.0;

    // [checkpoint]
    std::string load;
    bool load_twin_i = false;
    std::string save;
    std::size_t save_every = 0;  // episodes; 0: only at the end

    // [log]
    std::string metrics;

    sac::SacConfig sac_config() const;
    inhibitory::SaciConfig saci_config() const;
    envs::EnvOptions env_options() const;
};

/// Throws ConfigError on out-of-range values or inconsistent combinations.
void validate(const TrainConfig& cfg);

/// `[section]` headers and `key = value` lines; `#` starts a comment. Keys not listed in
/// format_config are rejected.
TrainConfig parse_config(const std::string& text);
TrainConfig parse_config(const std::string& text, TrainConfig base);

/// Canonical text; parse_config(format_config(c)) reproduces c.
std::string format_config(const TrainConfig& cfg);

/// Applies `section.key=value`.
void apply_override(TrainConfig& cfg, const std::string& assignment);

TrainConfig load_config_file(const std::string& path);
/// Keys in the file override `base`.
TrainConfig load_config_file(const std::string& path, TrainConfig base);

/// Named experiment designs.
std::vector<std::string> preset_names();
TrainConfig preset(const std::string& name);

} // namespace saci::harness
