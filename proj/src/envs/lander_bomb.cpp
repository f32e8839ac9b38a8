#include "saci/envs/lander_bomb.hpp"

#include <algorithm>
#include <cmath>

namespace saci::envs {

LanderBomb::LanderBomb(LanderBombConfig cfg)
    : cfg_(cfg), spec_{static_cast<std::size_t>(LanderObs::size), 2, cfg.max_steps, "lander"}
{
    if (cfg_.bomb_freq < 0.0 || cfg_.bomb_freq > 1.0 || cfg_.max_steps == 0) {
        throw std::invalid_argument("lander: bomb_freq must lie in [0,1] and max_steps >= 1");
    }
}

ResetResult LanderBomb::reset(std::uint64_t seed)
{
    rng_.seed(seed);
    kind_ = numcore::uniform(rng_, 0.0, 1.0) < cfg_.bomb_freq ? TrialKind::stop : TrialKind::go;
    body_ = Body{};
    body_.x = numcore::uniform(rng_, -0.1, 0.1);
    body_.y = kTopY;
    body_.vx = numcore::uniform(rng_, -0.005, 0.005);
    body_.vy = numcore::uniform(rng_, -0.01, 0.0);
    trigger_y_ = numcore::uniform(rng_, 0.9, 1.1);
    bomb_x_ = numcore::uniform(rng_, -0.2, 0.2);
    bomb_y_ = numcore::uniform(rng_, 0.1, 0.5);
    bomb_present_ = false;
    steps_ = 0;
    done_ = false;
    return ResetResult{observe(), info()};
}

void LanderBomb::force_bomb(double x, double y)
{
    bomb_x_ = x;
    bomb_y_ = y;
    bomb_present_ = true;
    kind_ = TrialKind::stop;
}

double LanderBomb::potential() const
{
    const double dist = std::hypot(body_.x, body_.y);
    const double speed = kVelocityScale * std::hypot(body_.vx, body_.vy);
    return -kDistanceWeight * dist - kSpeedWeight * speed;
}

bool LanderBomb::inside_bomb() const
{
    return bomb_present_ && std::abs(body_.x - bomb_x_) <= kZoneHalfWidth &&
           std::abs(body_.y - bomb_y_) <= kZoneHalfHeight;
}

StepResult LanderBomb::step(const Vector& action)
{
    if (done_) {
        throw UsageError("lander: step called on a finished episode; call reset first");
    }
    if (action.size() != 2) {
        throw UsageError("lander: action must have two elements");
    }
    const double main = std::max(0.0, std::clamp(action(0), -1.0, 1.0));
    const double side = std::clamp(action(1), -1.0, 1.0);
    const double before = potential();

    body_.vy += kMainAccel * main - kGravity;
    body_.vx += kSideAccel * side;
    const double previous_angle = body_.angle;
    body_.angle = 0.9 * body_.angle + 0.05 * side;
    body_.vangle = body_.angle - previous_angle;
    body_.x += body_.vx;
    body_.y += body_.vy;
    ++steps_;

    StepResult out;
    out.components.time_penalty = kTimePenalty;
    out.components.base = -kEngineCost * main - kSideEngineCost * std::abs(side);

    if (kind_ == TrialKind::stop && !bomb_present_ && body_.y <= trigger_y_) {
        bomb_present_ = true;
    }

    if (inside_bomb()) {
        out.components.bomb_penalty = kBombPenalty;
        out.cause = Cause::hit_bomb;
    } else if (std::abs(body_.x) > 1.0 || body_.y > kTopY + 0.2) {
        out.components.base += kCrashPenalty;
        out.cause = Cause::crashed;
    } else if (body_.y <= 0.0) {
        body_.y = 0.0;
        const bool gentle = std::abs(body_.vx) <= kSafeSpeed && std::abs(body_.vy) <= kSafeSpeed &&
                            std::abs(body_.angle) <= kSafeAngle;
        if (gentle) {
            body_.leg_left = true;
            body_.leg_right = true;
            body_.vx = 0.0;
            body_.vy = 0.0;
            out.components.base += 2.0 * kLegReward + kLandReward;
            out.cause = Cause::landed;
        } else {
            out.components.base += kCrashPenalty;
            out.cause = Cause::crashed;
        }
    }
    if (out.cause == Cause::running && steps_ >= cfg_.max_steps) {
        out.cause = Cause::timeout;
    }

    out.components.shaping = potential() - before;
    out.done = out.cause != Cause::running;
    done_ = out.done;
    out.reward_raw = out.components.sum();
    out.obs = observe();
    out.info = info();
    return out;
}

Vector LanderBomb::observe() const
{
    Vector obs(LanderObs::size);
    obs << body_.x, body_.y, kVelocityScale * body_.vx, kVelocityScale * body_.vy, body_.angle,
        kVelocityScale * body_.vangle, body_.leg_left ? 1.0 : 0.0, body_.leg_right ? 1.0 : 0.0,
        kDummyObs, kDummyObs, kDummyObs, kDummyObs;
    if (bomb_present_) {
        obs(LanderObs::zone_ul_x) = bomb_x_ - kZoneHalfWidth;
        obs(LanderObs::zone_ul_y) = bomb_y_ + kZoneHalfHeight;
        obs(LanderObs::zone_br_x) = bomb_x_ + kZoneHalfWidth;
        obs(LanderObs::zone_br_y) = bomb_y_ - kZoneHalfHeight;
    }
    return obs;
}

StepInfo LanderBomb::info() const
{
    StepInfo i;
    i.trial_kind = kind_;
    i.bomb_present = bomb_present_;
    if (bomb_present_) {
        i.bomb_center = std::array<double, 2>{bomb_x_, bomb_y_};
    }
    return i;
}

} // namespace saci::envs
