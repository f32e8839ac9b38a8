#pragma once

#include "saci/envs/env.hpp"
#include "saci/numcore/random.hpp"

namespace saci::envs {

struct StopGoConfig {
    double stop_prob = 0.5;
    std::size_t max_steps = 1000;
    std::size_t zone_duration = 15;  // frames the zone stays up once shown
};

/// One-dimensional stop-signal task.
///
/// A point mass with friction starts near 0 and must cross the goal line at 1. Commands
/// inside a dead zone produce no thrust. On stop trials a forbidden zone appears just ahead
/// of the mass once it passes a hidden trigger point, close enough that only immediate
/// braking avoids it, and vanishes `zone_duration` frames later; entering it ends the
/// episode.
///
/// obs = [position, velocity / max_speed, zone_left, zone_right] with -1 while no zone.
class StopGo1D final : public Environment {
public:
    static constexpr double kGoal = 5.0;
    static constexpr double kMaxSpeed = 0.05;
    static constexpr double kAccel = 0.02;
    static constexpr double kFriction = 0.9;
    static constexpr double kDeadZone = 0.3;
    static constexpr double kWall = -0.2;
    static constexpr double kZoneWidth = 0.1;
    static constexpr double kGoalReward = 100.0;
    static constexpr double kZonePenalty = -150.0;
    static constexpr double kTimePenalty = -0.1;

    explicit StopGo1D(StopGoConfig cfg = {});

    const EnvSpec& spec() const override { return spec_; }
    ResetResult reset(std::uint64_t seed) override;
    StepResult step(const Vector& action) override;

    double position() const { return pos_; }
    double velocity() const { return vel_; }
    bool zone_visible() const { return zone_visible_; }
    double zone_left() const { return zone_left_; }
    double trigger() const { return trigger_; }
    TrialKind trial_kind() const { return kind_; }

private:
    Vector observe() const;
    StepInfo info() const;

    StopGoConfig cfg_;
    EnvSpec spec_;
    numcore::Rng rng_;
    double pos_ = 0.0;
    double vel_ = 0.0;
    TrialKind kind_ = TrialKind::go;
    double trigger_ = 0.0;
    double zone_offset_ = 0.0;
    double zone_left_ = 0.0;
    bool zone_spawned_ = false;
    bool zone_visible_ = false;
    std::size_t zone_timer_ = 0;
    std::size_t steps_ = 0;
    bool done_ = true;
};

} // namespace saci::envs
