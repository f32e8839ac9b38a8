#include "saci/sac/critic.hpp"

#include "saci/numcore/random.hpp"

namespace saci::sac {

using numcore::require_shape;

TwinQ make_twin_q(std::size_t obs_dim, std::size_t action_dim,
                  const std::vector<std::size_t>& hidden, std::uint64_t seed)
{
    std::vector<std::size_t> sizes{obs_dim + action_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);

    TwinQ twin;
    twin.q1 = numcore::mlp_init(sizes, numcore::splitmix64(seed));
    twin.q2 = numcore::mlp_init(sizes, numcore::splitmix64(seed + 1));
    twin.q1_target = twin.q1;
    twin.q2_target = twin.q2;
    twin.adam1 = numcore::adam_init(twin.q1);
    twin.adam2 = numcore::adam_init(twin.q2);
    return twin;
}

Matrix q_input(const Matrix& states, const Matrix& actions)
{
    require_shape(states.rows() == actions.rows(), "states and actions batch sizes differ");
    Matrix x(states.rows(), states.cols() + actions.cols());
    x << states, actions;
    return x;
}

Vector target_value(const TwinQ& twin, const GaussianPolicy& policy, double alpha,
                    const Matrix& next_states, const Matrix& noise)
{
    const auto eval = evaluate_policy(policy, next_states, noise);
    const Matrix x = q_input(next_states, eval.actions);
    const Vector t1 = numcore::mlp_predict(twin.q1_target, x).col(0);
    const Vector t2 = numcore::mlp_predict(twin.q2_target, x).col(0);
    return t1.cwiseMin(t2) - alpha * eval.log_probs;
}

Vector td_targets(const TwinQ& twin, const GaussianPolicy& policy, double alpha, double gamma,
                  const SacBatch& batch, const Matrix& next_noise)
{
    const Vector v = target_value(twin, policy, alpha, batch.next_states, next_noise);
    return batch.rewards.array() + gamma * (1.0 - batch.dones.array()) * v.array();
}

QLoss q_loss_against(const TwinQ& twin, const SacBatch& batch, const Vector& targets)
{
    if (batch.empty()) {
        throw std::invalid_argument("q_loss: empty batch");
    }
    require_shape(targets.size() == batch.size(), "target vector length differs from batch");
    const double n = static_cast<double>(batch.size());
    const Matrix x = q_input(batch.states, batch.actions);

    QLoss out;
    out.targets = targets;
    auto head = [&](const MlpParams& q, double& loss, MlpGrads& grads) {
        auto fwd = numcore::mlp_forward(q, x);
        const Vector err = fwd.output.col(0) - targets;
        loss = 0.5 * err.squaredNorm() / n;
        // the reported loss averages the two heads, hence 1/(2n)
        const Matrix grad_out = err / (2.0 * n);
        grads = numcore::mlp_backward(q, fwd.cache, grad_out).param_grads;
    };
    head(twin.q1, out.loss_q1, out.grad_q1);
    head(twin.q2, out.loss_q2, out.grad_q2);
    out.loss = 0.5 * (out.loss_q1 + out.loss_q2);
    return out;
}

QLoss q_loss(const TwinQ& twin, const SacBatch& batch, const GaussianPolicy& policy, double alpha,
             double gamma, const Matrix& next_noise)
{
    if (batch.empty()) {
        throw std::invalid_argument("q_loss: empty batch");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw numcore::ConfigError("discount must lie in [0, 1)");
    }
    return q_loss_against(twin, batch, td_targets(twin, policy, alpha, gamma, batch, next_noise));
}

void apply_q_step(TwinQ& twin, const QLoss& loss, double lr)
{
    numcore::adam_step(twin.q1, loss.grad_q1, twin.adam1, lr);
    numcore::adam_step(twin.q2, loss.grad_q2, twin.adam2, lr);
}

void soft_update_targets(TwinQ& twin, double tau)
{
    numcore::polyak_update(twin.q1_target, twin.q1, tau);
    numcore::polyak_update(twin.q2_target, twin.q2, tau);
}

PolicyTerm policy_term(const GaussianPolicy& policy, const TwinQ& twin, const PolicyEval& eval,
                       const Matrix& states, double alpha)
{
    const auto rows = states.rows();
    require_shape(rows > 0 && eval.actions.rows() == rows, "policy term batch mismatch");
    const double n = static_cast<double>(rows);
    const Matrix x = q_input(states, eval.actions);
    const auto f1 = numcore::mlp_forward(twin.q1, x);
    const auto f2 = numcore::mlp_forward(twin.q2, x);

    Matrix go1 = Matrix::Zero(rows, 1);
    Matrix go2 = Matrix::Zero(rows, 1);
    double min_sum = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double a = f1.output(r, 0);
        const double b = f2.output(r, 0);
        if (a <= b) {
            go1(r, 0) = -1.0 / n;
            min_sum += a;
        } else {
            go2(r, 0) = -1.0 / n;
            min_sum += b;
        }
    }

    PolicyTerm term;
    term.loss = alpha * eval.log_probs.mean() - min_sum / n;

    const Matrix gin = numcore::mlp_input_gradient(twin.q1, f1.cache, go1) +
                       numcore::mlp_input_gradient(twin.q2, f2.cache, go2);
    const Matrix grad_actions = gin.rightCols(eval.actions.cols());
    const Vector grad_log_probs = Vector::Constant(rows, alpha / n);
    term.grads = policy_backward(policy, eval, grad_actions, grad_log_probs);
    return term;
}

} // namespace saci::sac
