#include "saci/inhibitory/losses.hpp"

namespace saci::inhibitory {

sac::QLoss q_loss_branch(const sac::TwinQ& twin_k, const SacBatch& batch_k,
                         const sac::GaussianPolicy& policy, double alpha_k, double gamma,
                         const Matrix& next_noise)
{
    return sac::q_loss(twin_k, batch_k, policy, alpha_k, gamma, next_noise);
}

sac::AlphaLoss dual_alpha_loss(const sac::Temperature& temp_k, const Vector& log_probs_k)
{
    if (log_probs_k.size() == 0) {
        return {};
    }
    return sac::alpha_loss(temp_k, log_probs_k);
}

void accumulate(sac::PolicyTerm& a, const sac::PolicyTerm& b)
{
    a.loss += b.loss;
    numcore::add_scaled(a.grads, b.grads, 1.0);
}

std::optional<sac::PolicyTerm> composite_policy_loss(
    const sac::GaussianPolicy& policy, const sac::TwinQ& twin_r, const sac::TwinQ& twin_i,
    const Matrix& states_r, const Matrix& states_i, double alpha_r, double alpha_i,
    const Matrix& noise_r, const Matrix& noise_i)
{
    std::optional<sac::PolicyTerm> total;
    if (states_r.rows() > 0) {
        total = sac::policy_loss(policy, twin_r, states_r, alpha_r, noise_r);
    }
    if (states_i.rows() > 0) {
        auto term = sac::policy_loss(policy, twin_i, states_i, alpha_i, noise_i);
        if (total) {
            accumulate(*total, term);
        } else {
            total = std::move(term);
        }
    }
    return total;
}

} // namespace saci::inhibitory
