#pragma once

#include "saci/numcore/mlp.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace saci::sac {

using numcore::Matrix;
using numcore::MlpGrads;
using numcore::MlpParams;
using numcore::Vector;

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEpsilon = 1e-6;

/// State -> (mean, log-std) network; actions are tanh-squashed Gaussian samples.
struct GaussianPolicy {
    MlpParams net;
    std::size_t action_dim = 0;

    std::size_t obs_dim() const { return net.input_size(); }
};

/// hidden = widths of the hidden layers, e.g. {256}.
GaussianPolicy make_policy(std::size_t obs_dim, std::size_t action_dim,
                           const std::vector<std::size_t>& hidden, std::uint64_t seed);

/// Reparameterized evaluation of a batch: u = mean + std * noise, action = tanh(u).
struct PolicyEval {
    numcore::ForwardCache cache;
    Matrix mean;
    Matrix log_std;
    Matrix noise;
    Matrix pre_tanh;
    Matrix actions;
    Vector log_probs;
    Matrix log_std_active;  // 1 where the clamp is inactive
};

PolicyEval evaluate_policy(const GaussianPolicy& policy, const Matrix& states,
                           const Matrix& noise);

/// Parameter gradients of L given dL/d(actions) and dL/d(log_probs) for each row.
MlpGrads policy_backward(const GaussianPolicy& policy, const PolicyEval& eval,
                         const Matrix& grad_actions, const Vector& grad_log_probs);

struct ActionSample {
    Vector action;
    double log_prob = 0.0;
};

ActionSample sample_action(const GaussianPolicy& policy, const Vector& state,
                           const Vector& noise);

/// Mode of the squashed distribution, tanh(mean).
Vector deterministic_action(const GaussianPolicy& policy, const Vector& state);

/// Pre-squash mean, used where the raw policy output matters (hard switch threshold).
Vector policy_mean(const GaussianPolicy& policy, const Vector& state);

} // namespace saci::sac
