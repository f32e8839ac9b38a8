#include "saci/envs/stopgo.hpp"

#include <algorithm>
#include <cmath>

namespace saci::envs {

StopGo1D::StopGo1D(StopGoConfig cfg)
    : cfg_(cfg), spec_{4, 1, cfg.max_steps, "stopgo"}
{
    if (cfg_.stop_prob < 0.0 || cfg_.stop_prob > 1.0 || cfg_.max_steps == 0) {
        throw std::invalid_argument("stopgo: stop_prob must lie in [0,1] and max_steps >= 1");
    }
}

ResetResult StopGo1D::reset(std::uint64_t seed)
{
    rng_.seed(seed);
    // fixed draw order: trial kind, start, trigger, zone offset
    kind_ = numcore::uniform(rng_, 0.0, 1.0) < cfg_.stop_prob ? TrialKind::stop : TrialKind::go;
    pos_ = numcore::uniform(rng_, -0.05, 0.05);
    vel_ = 0.0;
    trigger_ = numcore::uniform(rng_, 0.5, 4.0);
    zone_offset_ = numcore::uniform(rng_, 0.04, 0.08);
    zone_left_ = 0.0;
    zone_spawned_ = false;
    zone_visible_ = false;
    zone_timer_ = 0;
    steps_ = 0;
    done_ = false;
    return ResetResult{observe(), info()};
}

StepResult StopGo1D::step(const Vector& action)
{
    if (done_) {
        throw UsageError("stopgo: step called on a finished episode; call reset first");
    }
    if (action.size() != 1) {
        throw UsageError("stopgo: action must have one element");
    }
    const double a = std::clamp(action(0), -1.0, 1.0);
    const double drive = std::abs(a) <= kDeadZone
                             ? 0.0
                             : std::copysign((std::abs(a) - kDeadZone) / (1.0 - kDeadZone), a);

    vel_ = std::clamp(kFriction * vel_ + kAccel * drive, -kMaxSpeed, kMaxSpeed);
    pos_ += vel_;
    if (pos_ < kWall) {
        pos_ = kWall;
        vel_ = 0.0;
    }
    ++steps_;

    StepResult out;
    out.components.time_penalty = kTimePenalty;

    if (zone_visible_) {
        if (pos_ >= zone_left_) {
            out.components.bomb_penalty = kZonePenalty;
            out.cause = Cause::hit_bomb;
        } else if (++zone_timer_ >= cfg_.zone_duration) {
            zone_visible_ = false;
        }
    } else if (kind_ == TrialKind::stop && !zone_spawned_ && pos_ >= trigger_) {
        zone_spawned_ = true;
        zone_visible_ = true;
        zone_left_ = pos_ + zone_offset_;
    }

    if (out.cause == Cause::running && pos_ >= kGoal) {
        out.components.base = kGoalReward;
        out.cause = Cause::finished;
    }
    if (out.cause == Cause::running && steps_ >= cfg_.max_steps) {
        out.cause = Cause::timeout;
    }

    out.done = out.cause != Cause::running;
    done_ = out.done;
    out.reward_raw = out.components.sum();
    out.obs = observe();
    out.info = info();
    return out;
}

Vector StopGo1D::observe() const
{
    Vector obs(4);
    obs << pos_, vel_ / kMaxSpeed, kDummyObs, kDummyObs;
    if (zone_visible_) {
        obs(2) = zone_left_;
        obs(3) = zone_left_ + kZoneWidth;
    }
    return obs;
}

StepInfo StopGo1D::info() const
{
    StepInfo i;
    i.trial_kind = kind_;
    i.bomb_present = zone_visible_;
    if (zone_visible_) {
        i.bomb_center = std::array<double, 2>{zone_left_ + 0.5 * kZoneWidth, 0.0};
    }
    return i;
}

} // namespace saci::envs
