#include "saci/inhibitory/inhibitory_policy.hpp"

namespace saci::inhibitory {

std::string_view to_string(InhibitionMode m)
{
    switch (m) {
    case InhibitionMode::rule:
        return "rule";
    case InhibitionMode::hard_switch:
        return "hard_switch";
    case InhibitionMode::soft_modulator:
        return "soft_modulator";
    }
    return "rule";
}

InhibitionMode inhibition_mode_from_string(std::string_view s)
{
    for (auto m : {InhibitionMode::rule, InhibitionMode::hard_switch,
                   InhibitionMode::soft_modulator}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw numcore::ConfigError("unknown inhibition mode '" + std::string(s) + "'");
}

InhibitoryPolicy make_inhibitory_policy(InhibitionMode mode, std::size_t obs_dim,
                                        const sac::SacConfig& cfg, std::uint64_t seed,
                                        std::size_t warmup_episodes)
{
    if (mode == InhibitionMode::rule) {
        throw numcore::ConfigError("an inhibitory policy needs hard_switch or soft_modulator");
    }
    return InhibitoryPolicy{mode, sac::make_sac_agent(obs_dim, 1, cfg, seed), warmup_episodes};
}

Branch switch_branch(double squashed_action)
{
    return squashed_action > 0.0 ? Branch::I : Branch::R;
}

double weight_from_action(double squashed_action)
{
    return 0.5 * (squashed_action + 1.0);
}

namespace {

void require_modulator(const InhibitoryPolicy& ip)
{
    if (ip.mode != InhibitionMode::soft_modulator) {
        throw envs::UsageError("modulator_weight requires soft_modulator mode");
    }
}

} // namespace

double modulator_weight(const InhibitoryPolicy& ip, const Vector& state)
{
    require_modulator(ip);
    return weight_from_action(sac::deterministic_action(ip.agent.policy, state)(0));
}

double modulator_weight(const InhibitoryPolicy& ip, const Vector& state, const Vector& noise)
{
    require_modulator(ip);
    return weight_from_action(sac::sample_action(ip.agent.policy, state, noise).action(0));
}

Branch classify_state(const InhibitionRule& rule, const Vector& state,
                      const envs::StepInfo& info)
{
    return rule(state, info) ? Branch::I : Branch::R;
}

Classification classify_state(const InhibitoryPolicy& ip, const InhibitionRule& rule,
                              const Vector& state, const envs::StepInfo& info,
                              const Vector* noise)
{
    Classification c;
    c.inhibitor_action = noise ? sac::sample_action(ip.agent.policy, state, *noise).action(0)
                               : sac::deterministic_action(ip.agent.policy, state)(0);
    if (ip.mode == InhibitionMode::hard_switch) {
        c.branch = switch_branch(c.inhibitor_action);
    } else {
        c.branch = classify_state(rule, state, info);
        c.weight = weight_from_action(c.inhibitor_action);
    }
    return c;
}

std::optional<sac::SacMetrics> inhibitory_policy_update(InhibitoryPolicy& ip,
                                                        const ReplayPartition& partition,
                                                        const SampledIndices& indices,
                                                        const sac::SacConfig& cfg,
                                                        std::size_t episode,
                                                        numcore::Rng& noise_rng)
{
    if (episode < ip.warmup_episodes || indices.empty()) {
        return std::nullopt;
    }
    const auto batch = inhibitor_batch(partition, indices);
    const auto noise = sac::draw_update_noise(batch.size(), 1, noise_rng);
    return sac::sac_update_step(ip.agent, batch, cfg, noise);
}

} // namespace saci::inhibitory
