#pragma once

#include "saci/numcore/named_tensors.hpp"
#include "saci/numcore/random.hpp"
#include "saci/sac/critic.hpp"
#include "saci/sac/temperature.hpp"

#include <optional>

namespace saci::sac {

struct SacConfig {
    double gamma = 0.99;
    double tau = 1e-3;
    double lr = 5e-4;
    std::size_t batch_size = 64;
    double target_entropy = -3.0;
    std::vector<std::size_t> hidden{256};
};

struct SacAgent {
    GaussianPolicy policy;
    numcore::AdamState policy_adam;
    TwinQ twin;
    Temperature temp;
};

SacAgent make_sac_agent(std::size_t obs_dim, std::size_t action_dim, const SacConfig& cfg,
                        std::uint64_t seed);

struct SacMetrics {
    double q_loss = 0.0;
    double policy_loss = 0.0;
    double alpha_loss = 0.0;
    double alpha = 0.0;
    double mean_log_prob = 0.0;
};

/// J_pi on the given states with reparameterization noise.
PolicyTerm policy_loss(const GaussianPolicy& policy, const TwinQ& twin, const Matrix& states,
                       double alpha, const Matrix& noise);

/// Noise for one update: next-state actions then current-state actions, drawn in that order.
struct UpdateNoise {
    Matrix next;
    Matrix current;
};

UpdateNoise draw_update_noise(Eigen::Index batch, std::size_t action_dim, numcore::Rng& rng);

/// One gradient step: twin Q, temperature, target averaging, then the policy.
SacMetrics sac_update_step(SacAgent& agent, const SacBatch& batch, const SacConfig& cfg,
                           const UpdateNoise& noise);

/// Samples a batch then updates. Returns nullopt (no state change, no draws) while the
/// buffer holds fewer than batch_size entries.
std::optional<SacMetrics> sac_update_step(SacAgent& agent, const RingBuffer<Experience>& replay,
                                          const SacConfig& cfg, numcore::Rng& sampler_rng,
                                          numcore::Rng& noise_rng);

/// Writes `<prefix>q1.*`, `<prefix>q2.*` and both targets.
void put_twin(numcore::NamedTensors& table, const std::string& prefix, const TwinQ& twin);

/// Loads weights into `twin` (shapes taken from its current networks); optimizer state resets.
void get_twin(const numcore::NamedTensors& table, const std::string& prefix, TwinQ& twin);

/// policy.*, q1.*, q2.*, q1_target.*, q2_target.*, log_alpha
numcore::NamedTensors export_tensors(const SacAgent& agent);

/// Inverse of export_tensors. Optimizer moments restart from zero.
void import_tensors(SacAgent& agent, const numcore::NamedTensors& table);

} // namespace saci::sac
