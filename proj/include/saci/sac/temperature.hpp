#pragma once

#include "saci/numcore/adam.hpp"
#include "saci/numcore/matrix.hpp"

#include <cmath>

namespace saci::sac {

/// Entropy temperature, learned in log space.
struct Temperature {
    double log_alpha = 0.0;
    numcore::ScalarAdamState adam;
    double target_entropy = -3.0;

    double alpha() const { return std::exp(log_alpha); }
};

struct AlphaLoss {
    double loss = 0.0;
    double grad_log_alpha = 0.0;
};

/// J = mean(-alpha * log_pi - alpha * H0) with alpha = exp(log_alpha); log_pi held fixed.
AlphaLoss alpha_loss(const Temperature& temp, const numcore::Vector& log_probs);

void apply_alpha_step(Temperature& temp, const AlphaLoss& loss, double lr);

} // namespace saci::sac
