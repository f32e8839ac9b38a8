#include "saci/sac/temperature.hpp"

#include <stdexcept>

namespace saci::sac {

AlphaLoss alpha_loss(const Temperature& temp, const numcore::Vector& log_probs)
{
    if (log_probs.size() == 0 || !log_probs.allFinite()) {
        throw numcore::NumericError("alpha_loss: log-probabilities must be finite and non-empty");
    }
    const double alpha = temp.alpha();
    const double shortfall = log_probs.mean() + temp.target_entropy;
    // d/dlog_alpha of -alpha * shortfall is -alpha * shortfall
    return AlphaLoss{-alpha * shortfall, -alpha * shortfall};
}

void apply_alpha_step(Temperature& temp, const AlphaLoss& loss, double lr)
{
    numcore::adam_step(temp.log_alpha, loss.grad_log_alpha, temp.adam, lr);
}

} // namespace saci::sac
