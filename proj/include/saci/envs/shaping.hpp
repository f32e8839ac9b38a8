#pragma once

#include "saci/envs/env.hpp"

#include <array>
#include <cstddef>

namespace saci::envs {

/// Quartic avoidance field around a bomb: -1e4 * (d - 0.3)^4 for distance d to its center.
double bomb_proxy_shaping(double distance);

/// Terms of the conservative lander shaping, each evaluated from the observation.
struct ConservativeTerms {
    double r_x = 0.0;
    double r_y = 0.0;
    double r_angle = 0.0;
    double r_vel = 0.0;

    double total() const { return r_x + r_y + r_angle + r_vel; }
};

/// r_x = -1/(6 dx + 0.1) + 0.77, r_y = -3 (dy - 0.05)^2, r_angle = -angle^2,
/// r_vel = -2 (vx^2 + vy^2 + vangle^2); dx, dy are distances to the bomb center.
ConservativeTerms conservative_terms(double dx, double dy, double angle, double vx, double vy,
                                     double vangle);

/// Applies conservative_terms to a lander observation and bomb center.
double conservative_shaping(const Vector& lander_obs, const std::array<double, 2>& bomb_center);

/// Trailing six-reward window, zero-padded at episode start.
class StuckWindow {
public:
    static constexpr std::size_t kLength = 6;

    void reset() { *this = StuckWindow{}; }
    void push(double reward);
    /// Sum of the window when negative, else zero.
    double value() const;
    double sum() const;

private:
    std::array<double, kLength> rewards_{};
    std::size_t next_ = 0;
};

/// Sum of the last six entries of `recent` (missing entries count as zero), kept only if negative.
double stuck_reward(const double* recent, std::size_t count);

// Built-in inhibition predicates: true means the state belongs to the inhibitory branch.

/// y > y_b and d_b < 0.3 while a bomb is present.
bool lander_proximity_rule(const Vector& obs, const StepInfo& info);

/// d_x < 0.2 and y > y_b while a bomb is present.
bool lander_conservative_rule(const Vector& obs, const StepInfo& info);

/// Stop zone currently shown.
bool stopgo_zone_rule(const Vector& obs, const StepInfo& info);

/// Runner reports the agent as stuck.
bool runner_stuck_rule(const Vector& obs, const StepInfo& info);

} // namespace saci::envs
