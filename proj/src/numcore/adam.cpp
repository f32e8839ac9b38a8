#include "saci/numcore/adam.hpp"

#include <cmath>

namespace saci::numcore {

AdamState adam_init(const MlpParams& params)
{
    return AdamState{zeros_like(params), zeros_like(params), 0};
}

namespace {

template <typename P, typename G>
void update_block(P& param, const G& grad, P& m, P& v, double lr, double c1, double c2,
                  const AdamConfig& cfg)
{
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.epsilon);
}

} // namespace

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, double lr,
               const AdamConfig& cfg)
{
    require_shape(same_shape(params, grads), "adam_step: gradient shape differs from params");
    require_shape(same_shape(params, state.m) && same_shape(params, state.v),
                  "adam_step: optimizer state shape differs from params");
    if (!all_finite(grads)) {
        throw NumericError("adam_step: non-finite gradient, step refused");
    }

    state.t += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        update_block(params.weights[i], grads.weights[i], state.m.weights[i], state.v.weights[i],
                     lr, c1, c2, cfg);
        update_block(params.biases[i], grads.biases[i], state.m.biases[i], state.v.biases[i], lr,
                     c1, c2, cfg);
    }
}

void adam_step(double& param, double grad, ScalarAdamState& state, double lr,
               const AdamConfig& cfg)
{
    if (!std::isfinite(grad)) {
        throw NumericError("adam_step: non-finite gradient, step refused");
    }
    state.t += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad * grad;
    param -= lr * (state.m / c1) / (std::sqrt(state.v / c2) + cfg.epsilon);
}

} // namespace saci::numcore
