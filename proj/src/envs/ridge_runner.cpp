#include "saci/envs/ridge_runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace saci::envs {

namespace {

constexpr double kPit = -10.0;
constexpr double kFace = 1e-6;

} // namespace

RidgeRunner::RidgeRunner(RidgeRunnerConfig cfg)
    : cfg_(cfg), spec_{12, 4, cfg.max_steps, "runner"}
{
    if (cfg_.stop_prob < 0.0 || cfg_.stop_prob > 1.0 || cfg_.max_steps == 0 ||
        cfg_.stall_limit == 0) {
        throw std::invalid_argument("runner: invalid configuration");
    }
}

ResetResult RidgeRunner::reset(std::uint64_t seed)
{
    rng_.seed(seed);
    kind_ = numcore::uniform(rng_, 0.0, 1.0) < cfg_.stop_prob ? TrialKind::stop : TrialKind::go;
    obstacles_.clear();
    if (kind_ == TrialKind::stop) {
        double at = numcore::uniform(rng_, 1.5, 2.5);
        while (at < kTrackLength - 1.0) {
            Obstacle o;
            o.start = at;
            if (numcore::uniform(rng_, 0.0, 1.0) < 0.5) {
                o.kind = Obstacle::Kind::block;
                o.width = 0.4;
                o.height = numcore::uniform(rng_, 0.3, 0.5);
            } else {
                o.kind = Obstacle::Kind::gap;
                o.width = numcore::uniform(rng_, 0.4, 0.7);
            }
            obstacles_.push_back(o);
            at += o.width + numcore::uniform(rng_, 2.0, 3.0);
        }
    }
    x_ = 0.0;
    z_ = 0.0;
    vx_ = 0.0;
    vz_ = 0.0;
    pitch_ = numcore::uniform(rng_, -0.05, 0.05);
    pitch_rate_ = 0.0;
    joints_.fill(0.0);
    window_.reset();
    best_x_ = 0.0;
    stall_ = 0;
    steps_ = 0;
    done_ = false;
    return ResetResult{observe(), info()};
}

double RidgeRunner::ground(double x) const
{
    for (const auto& o : obstacles_) {
        if (x >= o.start && x <= o.start + o.width) {
            return o.kind == Obstacle::Kind::block ? o.height : kPit;
        }
    }
    return 0.0;
}

StepResult RidgeRunner::step(const Vector& action)
{
    if (done_) {
        throw UsageError("runner: step called on a finished episode; call reset first");
    }
    if (action.size() != 4) {
        throw UsageError("runner: action must have four elements");
    }
    std::array<double, 4> a{};
    double effort = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        a[j] = std::clamp(action(static_cast<Eigen::Index>(j)), -1.0, 1.0);
        joints_[j] += 0.5 * (a[j] - joints_[j]);
        effort += std::abs(a[j]);
    }
    const double drive = 0.5 * (a[0] + a[2]);
    const double knee = 0.5 * (a[1] + a[3]);
    const double x_before = x_;

    const bool on_ground = z_ <= ground(x_) + 1e-9 && vz_ <= 0.0;
    if (on_ground) {
        vx_ = 0.85 * vx_ + 0.04 * drive;
        vz_ = 0.0;
        if (knee > 0.5) {
            vz_ = 0.10 + 0.24 * (knee - 0.5);
        }
    } else {
        vx_ = std::clamp(vx_ + 0.02 * drive, -0.3, 0.3);
        vz_ -= kGravity;
    }
    pitch_rate_ = 0.9 * pitch_rate_ + 0.03 * pitch_ + 0.04 * (a[0] - a[2]);
    pitch_ += pitch_rate_;

    double x_new = x_ + vx_;
    double z_new = z_ + vz_;
    for (const auto& o : obstacles_) {
        if (o.kind == Obstacle::Kind::block && x_ < o.start && x_new >= o.start &&
            z_new < o.height) {
            x_new = o.start - kFace;
            vx_ = 0.0;
            break;
        }
    }
    const double floor = ground(x_new);
    if (z_new <= floor && floor > kPit) {
        z_new = floor;
        vz_ = 0.0;
    }
    x_ = x_new;
    z_ = z_new;
    ++steps_;

    StepResult out;
    out.components.base = kProgressReward * (x_ - x_before) - kTorqueCost * effort;
    window_.push(out.components.base);
    if (cfg_.include_stuck) {
        out.components.stuck = window_.value();
    }

    if (x_ > best_x_ + 1e-3) {
        best_x_ = x_;
        stall_ = 0;
    } else {
        ++stall_;
    }

    if (std::abs(pitch_) > kMaxTilt || z_ < -0.3) {
        out.cause = Cause::fell;
        if (cfg_.include_fall) {
            out.components.fall = kFallPenalty;
        }
    } else if (x_ >= kTrackLength) {
        out.cause = Cause::finished;
    } else if (steps_ >= cfg_.max_steps || stall_ >= cfg_.stall_limit) {
        out.cause = Cause::timeout;
    }

    out.done = out.cause != Cause::running;
    done_ = out.done;
    out.reward_raw = out.components.sum();
    out.obs = observe();
    out.info = info();
    return out;
}

Vector RidgeRunner::observe() const
{
    double block_dist = 1.0;
    double block_height = 0.0;
    double gap_dist = 1.0;
    double gap_width = 0.0;
    bool block_seen = false;
    bool gap_seen = false;
    for (const auto& o : obstacles_) {
        const double ahead = o.start - x_;
        if (ahead < -o.width || ahead > kLookahead) {
            continue;
        }
        const double d = std::max(0.0, ahead) / kLookahead;
        if (o.kind == Obstacle::Kind::block && !block_seen) {
            block_seen = true;
            block_dist = d;
            block_height = o.height;
        } else if (o.kind == Obstacle::Kind::gap && !gap_seen) {
            gap_seen = true;
            gap_dist = d;
            gap_width = o.width;
        }
    }
    const double floor = ground(x_);
    const double height = std::min(1.0, z_ - std::max(floor, 0.0));
    const bool contact = z_ <= floor + 1e-9;
    Vector obs(12);
    obs << height, 4.0 * vx_, 4.0 * vz_, pitch_, 5.0 * pitch_rate_, 0.5 * (joints_[0] + joints_[2]),
        0.5 * (joints_[1] + joints_[3]), contact ? 1.0 : 0.0, block_dist, block_height, gap_dist,
        gap_width;
    return obs;
}

StepInfo RidgeRunner::info() const
{
    StepInfo i;
    i.trial_kind = kind_;
    i.stuck = window_.value() < 0.0;
    return i;
}

} // namespace saci::envs
