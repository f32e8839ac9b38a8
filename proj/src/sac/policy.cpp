#include "saci/sac/policy.hpp"

#include <cmath>
#include <numbers>

namespace saci::sac {

using numcore::NumericError;
using numcore::require_shape;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::vector<std::size_t> layer_plan(std::size_t in, const std::vector<std::size_t>& hidden,
                                    std::size_t out)
{
    std::vector<std::size_t> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

} // namespace

GaussianPolicy make_policy(std::size_t obs_dim, std::size_t action_dim,
                           const std::vector<std::size_t>& hidden, std::uint64_t seed)
{
    if (action_dim == 0) {
        throw numcore::ConfigError("policy action dimension must be positive");
    }
    return GaussianPolicy{numcore::mlp_init(layer_plan(obs_dim, hidden, 2 * action_dim), seed),
                          action_dim};
}

PolicyEval evaluate_policy(const GaussianPolicy& policy, const Matrix& states, const Matrix& noise)
{
    const auto d = static_cast<Eigen::Index>(policy.action_dim);
    require_shape(noise.rows() == states.rows() && noise.cols() == d,
                  "policy noise shape does not match batch x action_dim");
    auto fwd = numcore::mlp_forward(policy.net, states);
    if (!fwd.output.allFinite()) {
        throw NumericError("policy network produced non-finite output");
    }

    PolicyEval e;
    e.cache = std::move(fwd.cache);
    e.mean = fwd.output.leftCols(d);
    const Matrix raw_log_std = fwd.output.rightCols(d);
    e.log_std = raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
    e.log_std_active =
        ((raw_log_std.array() >= kLogStdMin) && (raw_log_std.array() <= kLogStdMax)).cast<double>();
    e.noise = noise;
    e.pre_tanh = e.mean.array() + e.log_std.array().exp() * noise.array();
    e.actions = e.pre_tanh.array().tanh();

    const auto squash = (1.0 - e.actions.array().square() + kSquashEpsilon).log();
    const auto gauss = -0.5 * noise.array().square() - e.log_std.array() - kHalfLog2Pi;
    e.log_probs = (gauss - squash).matrix().rowwise().sum();
    return e;
}

MlpGrads policy_backward(const GaussianPolicy& policy, const PolicyEval& eval,
                         const Matrix& grad_actions, const Vector& grad_log_probs)
{
    const auto n = eval.actions.rows();
    const auto d = eval.actions.cols();
    require_shape(grad_actions.rows() == n && grad_actions.cols() == d,
                  "grad_actions shape mismatch");
    require_shape(grad_log_probs.size() == n, "grad_log_probs length mismatch");

    const auto a = eval.actions.array();
    const auto one_minus_a2 = 1.0 - a.square();
    // d/du of -log(1 - tanh(u)^2 + eps)
    const auto squash_grad = 2.0 * a * one_minus_a2 / (one_minus_a2 + kSquashEpsilon);
    const auto sigma_noise = eval.log_std.array().exp() * eval.noise.array();
    const auto gl = grad_log_probs.replicate(1, d).array();
    const auto ga = grad_actions.array();

    Matrix grad_out(n, 2 * d);
    grad_out.leftCols(d) = ga * one_minus_a2 + gl * squash_grad;
    grad_out.rightCols(d) =
        eval.log_std_active.array() *
        (ga * one_minus_a2 * sigma_noise + gl * (squash_grad * sigma_noise - 1.0));
    return numcore::mlp_backward(policy.net, eval.cache, grad_out).param_grads;
}

ActionSample sample_action(const GaussianPolicy& policy, const Vector& state, const Vector& noise)
{
    require_shape(static_cast<std::size_t>(state.size()) == policy.obs_dim(),
                  "state dimension does not match policy input");
    const auto eval = evaluate_policy(policy, state.transpose(), noise.transpose());
    return ActionSample{eval.actions.row(0).transpose(), eval.log_probs(0)};
}

Vector policy_mean(const GaussianPolicy& policy, const Vector& state)
{
    require_shape(static_cast<std::size_t>(state.size()) == policy.obs_dim(),
                  "state dimension does not match policy input");
    const Matrix out = numcore::mlp_predict(policy.net, state.transpose());
    if (!out.allFinite()) {
        throw NumericError("policy network produced non-finite output");
    }
    return out.leftCols(static_cast<Eigen::Index>(policy.action_dim)).row(0).transpose();
}

Vector deterministic_action(const GaussianPolicy& policy, const Vector& state)
{
    return policy_mean(policy, state).array().tanh();
}

} // namespace saci::sac
