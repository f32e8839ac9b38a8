#pragma once

#include "saci/envs/env.hpp"
#include "saci/envs/shaping.hpp"
#include "saci/numcore/random.hpp"

#include <vector>

namespace saci::envs {

struct RidgeRunnerConfig {
    double stop_prob = 0.0;       // probability an episode uses the obstacle (hardcore) track
    bool include_fall = true;     // -100 on a fall
    bool include_stuck = false;   // add the trailing stuck penalty to the reward
    std::size_t max_steps = 2000;
    std::size_t stall_limit = 60; // frames without forward progress before the episode times out
};

struct Obstacle {
    enum class Kind { block, gap };
    Kind kind = Kind::block;
    double start = 0.0;
    double width = 0.0;
    double height = 0.0;  // blocks only
};

/// Hopper abstraction on a one-dimensional track.
///
/// Both hips drive the body forward while a foot is on the ground; a strong knee extension
/// launches a jump. Hip asymmetry tilts the hull, which is mildly unstable; a tilt beyond
/// 1 rad is a fall. Hardcore tracks add blocks (which stop the runner unless cleared by a
/// jump) and gaps (which are falls unless jumped). The track position is never observed.
///
/// obs = [height above ground, vx, vz, pitch, pitch rate, hip, knee, contact,
///        block distance, block height, gap distance, gap width]
class RidgeRunner final : public Environment {
public:
    static constexpr double kTrackLength = 10.0;
    static constexpr double kProgressReward = 300.0 / kTrackLength;
    static constexpr double kTorqueCost = 0.025;
    static constexpr double kFallPenalty = -100.0;
    static constexpr double kGravity = 0.03;
    static constexpr double kLookahead = 2.0;
    static constexpr double kMaxTilt = 1.0;

    explicit RidgeRunner(RidgeRunnerConfig cfg = {});

    const EnvSpec& spec() const override { return spec_; }
    ResetResult reset(std::uint64_t seed) override;
    StepResult step(const Vector& action) override;

    double track_position() const { return x_; }
    double height() const { return z_; }
    double pitch() const { return pitch_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    TrialKind trial_kind() const { return kind_; }

    /// Test hook: replace the track layout for the current episode.
    void set_obstacles(std::vector<Obstacle> obstacles) { obstacles_ = std::move(obstacles); }

private:
    double ground(double x) const;
    Vector observe() const;
    StepInfo info() const;

    RidgeRunnerConfig cfg_;
    EnvSpec spec_;
    numcore::Rng rng_;
    std::vector<Obstacle> obstacles_;
    TrialKind kind_ = TrialKind::go;
    double x_ = 0.0;
    double z_ = 0.0;
    double vx_ = 0.0;
    double vz_ = 0.0;
    double pitch_ = 0.0;
    double pitch_rate_ = 0.0;
    std::array<double, 4> joints_{};
    StuckWindow window_;
    double best_x_ = 0.0;
    std::size_t stall_ = 0;
    std::size_t steps_ = 0;
    bool done_ = true;
};

} // namespace saci::envs
