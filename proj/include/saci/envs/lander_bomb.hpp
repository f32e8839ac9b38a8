#pragma once

#include "saci/envs/env.hpp"
#include "saci/numcore/random.hpp"

namespace saci::envs {

/// Observation layout: 8 body values then the bomb zone corners (upper-left, bottom-right).
struct LanderObs {
    static constexpr Eigen::Index x = 0;
    static constexpr Eigen::Index y = 1;
    static constexpr Eigen::Index vx = 2;
    static constexpr Eigen::Index vy = 3;
    static constexpr Eigen::Index angle = 4;
    static constexpr Eigen::Index vangle = 5;
    static constexpr Eigen::Index leg_left = 6;
    static constexpr Eigen::Index leg_right = 7;
    static constexpr Eigen::Index zone_ul_x = 8;
    static constexpr Eigen::Index zone_ul_y = 9;
    static constexpr Eigen::Index zone_br_x = 10;
    static constexpr Eigen::Index zone_br_y = 11;
    static constexpr Eigen::Index size = 12;
};

struct LanderBombConfig {
    double bomb_freq = 0.5;
    std::size_t max_steps = 1000;
};

/// Point-mass lunar lander with a bomb that may appear above the pad mid-descent.
///
/// Frame: x in [-1, 1], y in [0, 1.4], ground at y = 0, pad centred at x = 0.
/// action[0] > 0 fires the main engine upward (throttle = action[0]); action[1] fires the
/// lateral thruster, which also tilts the body. Velocities in the observation are scaled
/// by kVelocityScale.
class LanderBomb final : public Environment {
public:
    static constexpr double kGravity = 0.0025;
    static constexpr double kMainAccel = 0.006;
    static constexpr double kSideAccel = 0.0015;
    static constexpr double kVelocityScale = 10.0;
    static constexpr double kSafeSpeed = 0.025;
    static constexpr double kSafeAngle = 0.3;
    static constexpr double kTopY = 1.4;
    static constexpr double kZoneHalfWidth = 0.1;
    static constexpr double kZoneHalfHeight = 0.07;
    // potential weight so the descent from the top accrues about 120 points
    static constexpr double kDistanceWeight = 120.0 / kTopY;
    static constexpr double kSpeedWeight = 10.0;
    static constexpr double kEngineCost = 0.3;
    static constexpr double kSideEngineCost = 0.03;
    static constexpr double kLegReward = 10.0;
    static constexpr double kLandReward = 100.0;
    static constexpr double kCrashPenalty = -100.0;
    static constexpr double kBombPenalty = -150.0;
    static constexpr double kTimePenalty = -0.1;

    explicit LanderBomb(LanderBombConfig cfg = {});

    const EnvSpec& spec() const override { return spec_; }
    ResetResult reset(std::uint64_t seed) override;
    StepResult step(const Vector& action) override;

    struct Body {
        double x = 0.0;
        double y = 0.0;
        double vx = 0.0;
        double vy = 0.0;
        double angle = 0.0;
        double vangle = 0.0;
        bool leg_left = false;
        bool leg_right = false;
    };

    const Body& body() const { return body_; }
    bool bomb_present() const { return bomb_present_; }
    std::array<double, 2> bomb_center() const { return {bomb_x_, bomb_y_}; }
    TrialKind trial_kind() const { return kind_; }

    /// Test hook: place the body directly (e.g. inside a bomb zone).
    void set_body(const Body& body) { body_ = body; }
    /// Test hook: show the bomb now at the given center.
    void force_bomb(double x, double y);

    double potential() const;

private:
    Vector observe() const;
    StepInfo info() const;
    bool inside_bomb() const;

    LanderBombConfig cfg_;
    EnvSpec spec_;
    numcore::Rng rng_;
    Body body_;
    TrialKind kind_ = TrialKind::go;
    double trigger_y_ = 1.0;
    double bomb_x_ = 0.0;
    double bomb_y_ = 0.0;
    bool bomb_present_ = false;
    std::size_t steps_ = 0;
    bool done_ = true;
};

} // namespace saci::envs
