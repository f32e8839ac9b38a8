#pragma once

#include "saci/numcore/mlp.hpp"

#include <cstdint>

namespace saci::numcore {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First and second moments mirroring an MlpParams, plus the step count.
struct AdamState {
    MlpParams m;
    MlpParams v;
    std::int64_t t = 0;
};

AdamState adam_init(const MlpParams& params);

/// Bias-corrected Adam step applied in place. Throws NumericError, leaving params and
/// state untouched, if any gradient is non-finite.
void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, double lr,
               const AdamConfig& cfg = {});

/// Adam for a single scalar such as a log-temperature.
struct ScalarAdamState {
    double m = 0.0;
    double v = 0.0;
    std::int64_t t = 0;
};

void adam_step(double& param, double grad, ScalarAdamState& state, double lr,
               const AdamConfig& cfg = {});

} // namespace saci::numcore
