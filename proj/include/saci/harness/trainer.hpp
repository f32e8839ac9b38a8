#pragma once

#include "saci/harness/checkpoint.hpp"
#include "saci/harness/config.hpp"
#include "saci/harness/metrics.hpp"
#include "saci/harness/seeding.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace saci::harness {

using numcore::Vector;

/// Inhibition rule the harness pairs with an environment and shaping choice.
inhibitory::InhibitionRule default_rule(const std::string& env, Shaping shaping);

/// Bomb shaping for a classified state; zero outside the rule's region or without a bomb.
double shaping_reward(Shaping shaping, const std::string& env, const Vector& obs,
                      const envs::StepInfo& info);

/// Builds the agent for `cfg`, loads `cfg.load` when set, and runs episodes with one gradient
/// step per environment step.
class Trainer {
public:
    explicit Trainer(TrainConfig cfg, std::unique_ptr<envs::Environment> env = nullptr);

    /// Plays one episode with learning and returns its record.
    MetricsRecord run_episode();

    /// Runs until the episode budget or the step cap is reached. Writes cfg.metrics and
    /// cfg.save when set; `on_episode` sees every record.
    std::vector<MetricsRecord> run(const std::function<void(const MetricsRecord&)>& on_episode = {});

    bool finished() const;

    Checkpoint checkpoint() const;

    const TrainConfig& config() const { return cfg_; }
    const envs::Environment& env() const { return *env_; }
    const sac::GaussianPolicy& policy() const;
    std::size_t total_steps() const { return total_steps_; }
    std::size_t episodes_done() const { return episodes_; }

    const sac::SacAgent* sac_agent() const { return sac_ ? &*sac_ : nullptr; }
    const inhibitory::SaciAgent* saci_agent() const { return saci_ ? &*saci_ : nullptr; }
    const inhibitory::ReplayPartition* partition() const
    {
        return partition_ ? &*partition_ : nullptr;
    }
    const sac::RingBuffer<sac::Experience>* sac_replay() const
    {
        return sac_replay_ ? &*sac_replay_ : nullptr;
    }

private:
    void load(const Checkpoint& ckpt);

    TrainConfig cfg_;
    std::unique_ptr<envs::Environment> env_;
    Streams streams_;
    inhibitory::InhibitionRule rule_;
    std::optional<sac::SacAgent> sac_;
    std::optional<sac::RingBuffer<sac::Experience>> sac_replay_;
    std::optional<inhibitory::SaciAgent> saci_;
    std::optional<inhibitory::ReplayPartition> partition_;
    Avg100 avg_;
    std::array<std::size_t, kTalliedCauses.size()> cause_counts_{};
    std::size_t total_steps_ = 0;
    std::size_t episodes_ = 0;
};

/// Converts a SAC-I table to SAC names (twin_r becomes the twin, alpha_R the temperature).
numcore::NamedTensors as_sac_tensors(const numcore::NamedTensors& table);

struct EvalSummary {
    std::size_t episodes = 0;
    double mean = 0.0;
    double std = 0.0;
    double success_rate = 0.0;  // landed or finished
    std::array<std::size_t, kTalliedCauses.size()> cause_counts{};
    double mean_go = 0.0;
    double mean_stop = 0.0;
    std::size_t go_episodes = 0;
    std::size_t stop_episodes = 0;
    std::vector<double> rewards;
};

/// Deterministic (mode) policy, no learning. Episode seeds come from `seed`'s eval stream.
EvalSummary evaluate(const sac::GaussianPolicy& policy, envs::Environment& env,
                     std::size_t n_episodes, std::uint64_t seed);

/// Rebuilds the policy from a checkpoint's tensors and config text, then evaluates it.
EvalSummary evaluate(const Checkpoint& ckpt, envs::Environment& env, std::size_t n_episodes,
                     std::uint64_t seed);

sac::GaussianPolicy policy_from_checkpoint(const Checkpoint& ckpt, const envs::EnvSpec& spec);

} // namespace saci::harness
