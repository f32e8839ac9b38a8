#pragma once

#include "saci/inhibitory/partition.hpp"
#include "saci/sac/sac_agent.hpp"
#include "saci/sac/temperature.hpp"

#include <optional>

namespace saci::inhibitory {

/// Critic loss for branch k: branch rewards, branch targets and alpha_k in the soft value.
sac::QLoss q_loss_branch(const sac::TwinQ& twin_k, const SacBatch& batch_k,
                         const sac::GaussianPolicy& policy, double alpha_k, double gamma,
                         const Matrix& next_noise);

/// Temperature loss on the log-probs of branch-k states. An empty vector is a no-op (zero
/// loss and gradient).
sac::AlphaLoss dual_alpha_loss(const sac::Temperature& temp_k, const Vector& log_probs_k);

/// Sum of per-branch means of alpha_k * log pi - min(Q_k1, Q_k2). An empty state matrix
/// drops that branch; nullopt when both are empty.
std::optional<sac::PolicyTerm> composite_policy_loss(
    const sac::GaussianPolicy& policy, const sac::TwinQ& twin_r, const sac::TwinQ& twin_i,
    const Matrix& states_r, const Matrix& states_i, double alpha_r, double alpha_i,
    const Matrix& noise_r, const Matrix& noise_i);

/// Adds b into a (loss and gradients).
void accumulate(sac::PolicyTerm& a, const sac::PolicyTerm& b);

} // namespace saci::inhibitory
