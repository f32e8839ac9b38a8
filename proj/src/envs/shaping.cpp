#include "saci/envs/shaping.hpp"

#include "saci/envs/lander_bomb.hpp"

#include <cmath>

namespace saci::envs {

double bomb_proxy_shaping(double distance)
{
    const double gap = distance - 0.3;
    return -1e4 * gap * gap * gap * gap;
}

ConservativeTerms conservative_terms(double dx, double dy, double angle, double vx, double vy,
                                     double vangle)
{
    ConservativeTerms t;
    t.r_x = -1.0 / (6.0 * dx + 0.1) + 0.77;
    t.r_y = -3.0 * (dy - 0.05) * (dy - 0.05);
    t.r_angle = -angle * angle;
    t.r_vel = -2.0 * (vx * vx + vy * vy + vangle * vangle);
    return t;
}

double conservative_shaping(const Vector& obs, const std::array<double, 2>& bomb_center)
{
    using L = LanderObs;
    const double dx = std::abs(obs(L::x) - bomb_center[0]);
    const double dy = std::abs(obs(L::y) - bomb_center[1]);
    return conservative_terms(dx, dy, obs(L::angle), obs(L::vx), obs(L::vy), obs(L::vangle))
        .total();
}

void StuckWindow::push(double reward)
{
    rewards_[next_] = reward;
    next_ = (next_ + 1) % kLength;
}

double StuckWindow::sum() const
{
    // oldest first
    double s = 0.0;
    for (std::size_t k = 0; k < kLength; ++k) {
        s += rewards_[(next_ + k) % kLength];
    }
    return s;
}

double StuckWindow::value() const
{
    const double s = sum();
    return s < 0.0 ? s : 0.0;
}

double stuck_reward(const double* recent, std::size_t count)
{
    StuckWindow window;
    const std::size_t start = count > StuckWindow::kLength ? count - StuckWindow::kLength : 0;
    for (std::size_t i = start; i < count; ++i) {
        window.push(recent[i]);
    }
    return window.value();
}

bool lander_proximity_rule(const Vector& obs, const StepInfo& info)
{
    if (!info.bomb_present || !info.bomb_center) {
        return false;
    }
    const auto [xb, yb] = *info.bomb_center;
    const double x = obs(LanderObs::x);
    const double y = obs(LanderObs::y);
    const double db = std::hypot(x - xb, y - yb);
    return y > yb && db < 0.3;
}

bool lander_conservative_rule(const Vector& obs, const StepInfo& info)
{
    if (!info.bomb_present || !info.bomb_center) {
        return false;
    }
    const auto [xb, yb] = *info.bomb_center;
    return std::abs(obs(LanderObs::x) - xb) < 0.2 && obs(LanderObs::y) > yb;
}

bool stopgo_zone_rule(const Vector& /*obs*/, const StepInfo& info)
{
    return info.bomb_present;
}

bool runner_stuck_rule(const Vector& /*obs*/, const StepInfo& info)
{
    return info.stuck;
}

} // namespace saci::envs
