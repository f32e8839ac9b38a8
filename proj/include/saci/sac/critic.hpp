#pragma once

#include "saci/numcore/adam.hpp"
#include "saci/sac/policy.hpp"
#include "saci/sac/replay.hpp"

namespace saci::sac {

/// Two online Q heads over (state ++ action) and their Polyak-averaged targets.
struct TwinQ {
    MlpParams q1;
    MlpParams q2;
    MlpParams q1_target;
    MlpParams q2_target;
    numcore::AdamState adam1;
    numcore::AdamState adam2;
};

/// Heads are seeded independently from `seed`; targets start as copies.
TwinQ make_twin_q(std::size_t obs_dim, std::size_t action_dim,
                  const std::vector<std::size_t>& hidden, std::uint64_t seed);

Matrix q_input(const Matrix& states, const Matrix& actions);

/// min(Q1_target, Q2_target)(s', a') - alpha * log pi(a'|s'), a' drawn with `noise`.
Vector target_value(const TwinQ& twin, const GaussianPolicy& policy, double alpha,
                    const Matrix& next_states, const Matrix& noise);

/// y = r + gamma * (1 - done) * V(s'), treated as a constant downstream.
Vector td_targets(const TwinQ& twin, const GaussianPolicy& policy, double alpha, double gamma,
                  const SacBatch& batch, const Matrix& next_noise);

struct QLoss {
    double loss = 0.0;  // mean over both heads
    double loss_q1 = 0.0;
    double loss_q2 = 0.0;
    MlpGrads grad_q1;
    MlpGrads grad_q2;
    Vector targets;
};

/// Mean over batch and heads of 0.5 * (Q(s,a) - y)^2 for the given fixed targets.
QLoss q_loss_against(const TwinQ& twin, const SacBatch& batch, const Vector& targets);

QLoss q_loss(const TwinQ& twin, const SacBatch& batch, const GaussianPolicy& policy, double alpha,
             double gamma, const Matrix& next_noise);

void apply_q_step(TwinQ& twin, const QLoss& loss, double lr);

void soft_update_targets(TwinQ& twin, double tau);

/// Actor term for one critic: mean over rows of alpha * log pi - min(Q1, Q2) at the
/// reparameterized actions. Gradients reach the policy only.
struct PolicyTerm {
    double loss = 0.0;
    MlpGrads grads;
};

PolicyTerm policy_term(const GaussianPolicy& policy, const TwinQ& twin, const PolicyEval& eval,
                       const Matrix& states, double alpha);

} // namespace saci::sac
