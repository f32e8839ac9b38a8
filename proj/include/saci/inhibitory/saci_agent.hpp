#pragma once

#include "saci/inhibitory/inhibitory_policy.hpp"
#include "saci/inhibitory/losses.hpp"
#include "saci/numcore/named_tensors.hpp"

#include <optional>

namespace saci::inhibitory {

struct SaciConfig {
    sac::SacConfig base;
    bool episodic_memory = true;  // false: one shared buffer, zero reward for the other branch
    bool dual_alpha = true;       // false: one temperature shared by both branches
    double inhibitor_target_entropy = -3.0;

    sac::SacConfig inhibitor_config() const;
};

struct SaciAgent {
    sac::GaussianPolicy policy;
    numcore::AdamState policy_adam;
    sac::TwinQ twin_r;
    sac::TwinQ twin_i;
    sac::Temperature temp_r;
    sac::Temperature temp_i;  // unused while dual_alpha is off
    bool dual_alpha = true;
    std::optional<InhibitoryPolicy> inhibitor;

    const sac::TwinQ& twin(Branch b) const { return b == Branch::R ? twin_r : twin_i; }
    sac::TwinQ& twin(Branch b) { return b == Branch::R ? twin_r : twin_i; }
    sac::Temperature& temp(Branch b) { return b == Branch::I && dual_alpha ? temp_i : temp_r; }
    const sac::Temperature& temp(Branch b) const
    {
        return b == Branch::I && dual_alpha ? temp_i : temp_r;
    }
    double alpha(Branch b) const { return temp(b).alpha(); }
};

/// Policy, twin_r and temp_r are initialized exactly as make_sac_agent with the same seed.
SaciAgent make_saci_agent(std::size_t obs_dim, std::size_t action_dim, const SaciConfig& cfg,
                          std::uint64_t seed);

struct SaciNoise {
    std::optional<sac::UpdateNoise> r;
    std::optional<sac::UpdateNoise> i;
};

/// Draw order: R next, R current, I next, I current; absent branches draw nothing.
SaciNoise draw_saci_noise(const BranchBatches& batches, std::size_t action_dim,
                          numcore::Rng& rng);

struct SaciMetrics {
    std::optional<double> q_loss_r;
    std::optional<double> q_loss_i;
    double policy_loss = 0.0;
    double alpha_loss_r = 0.0;
    double alpha_loss_i = 0.0;
    double alpha_r = 0.0;
    double alpha_i = 0.0;
    std::optional<sac::SacMetrics> inhibitor;
};

/// For each present branch: critic step, temperature step, target averaging. Then one actor
/// step on the composite loss. Throws std::invalid_argument when no branch is present.
SaciMetrics saci_update_step(SaciAgent& agent, const BranchBatches& batches,
                             const SaciConfig& cfg, const SaciNoise& noise);

struct UpdateStreams {
    numcore::Rng& sampler;
    numcore::Rng& noise;
    numcore::Rng& inhibitor;
};

/// Samples, updates the main agent, then pi_I when present and past its warmup.
/// nullopt when neither buffer holds a full batch.
std::optional<SaciMetrics> saci_update_step(SaciAgent& agent, const ReplayPartition& partition,
                                            const SaciConfig& cfg, UpdateStreams streams,
                                            std::size_t episode);

/// policy.*, twin_r.*, twin_i.*, log_alpha_r, log_alpha_i and pi_i.* when present.
numcore::NamedTensors export_tensors(const SaciAgent& agent);

/// Inverse of export_tensors; optimizer state restarts.
void import_tensors(SaciAgent& agent, const numcore::NamedTensors& table);

/// Transfers policy, twin_r and alpha_R from a SAC or SAC-I table. With `load_twin_i` the
/// inhibitory critics and alpha_I are also loaded (from twin_i when the table has one,
/// otherwise from the regular critics); without it they keep their fresh initialization.
void retrain_from(SaciAgent& agent, const numcore::NamedTensors& table, bool load_twin_i);

} // namespace saci::inhibitory
