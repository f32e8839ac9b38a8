#pragma once

#include "saci/envs/env.hpp"
#include "saci/inhibitory/partition.hpp"
#include "saci/sac/sac_agent.hpp"

#include <functional>
#include <optional>
#include <string_view>

namespace saci::inhibitory {

enum class InhibitionMode { rule, hard_switch, soft_modulator };

std::string_view to_string(InhibitionMode m);
InhibitionMode inhibition_mode_from_string(std::string_view s);

/// State predicate; true selects the inhibitory branch.
using InhibitionRule = std::function<bool(const Vector& state, const envs::StepInfo& info)>;

/// Stand-alone SAC agent over a one-dimensional action, with its own critics and temperature.
struct InhibitoryPolicy {
    InhibitionMode mode = InhibitionMode::hard_switch;
    sac::SacAgent agent;
    std::size_t warmup_episodes = 0;
};

InhibitoryPolicy make_inhibitory_policy(InhibitionMode mode, std::size_t obs_dim,
                                        const sac::SacConfig& cfg, std::uint64_t seed,
                                        std::size_t warmup_episodes);

/// Hard switch: the inhibitory branch is selected when the squashed output is positive.
Branch switch_branch(double squashed_action);

/// (tanh(u) + 1) / 2 for a squashed output tanh(u).
double weight_from_action(double squashed_action);

/// Soft-modulator weight at the mode of the policy. Throws UsageError in hard-switch mode.
double modulator_weight(const InhibitoryPolicy& ip, const Vector& state);

/// Soft-modulator weight for a sampled action with the given standard-normal noise.
double modulator_weight(const InhibitoryPolicy& ip, const Vector& state, const Vector& noise);

struct Classification {
    Branch branch = Branch::R;
    double weight = 1.0;            // soft modulator only
    double inhibitor_action = 0.0;  // squashed pi_I output that was acted on
};

Branch classify_state(const InhibitionRule& rule, const Vector& state,
                      const envs::StepInfo& info);

/// Hard switch decides the branch from pi_I; soft modulator takes the branch from `rule` and
/// the weight from pi_I. Without noise pi_I acts at its mode.
Classification classify_state(const InhibitoryPolicy& ip, const InhibitionRule& rule,
                              const Vector& state, const envs::StepInfo& info,
                              const Vector* noise);

/// One SAC update of pi_I on the raw reward, over the transitions already sampled for the
/// main agent. No-op (nullopt) before the warmup episode count or with nothing sampled.
std::optional<sac::SacMetrics> inhibitory_policy_update(InhibitoryPolicy& ip,
                                                        const ReplayPartition& partition,
                                                        const SampledIndices& indices,
                                                        const sac::SacConfig& cfg,
                                                        std::size_t episode,
                                                        numcore::Rng& noise_rng);

} // namespace saci::inhibitory
