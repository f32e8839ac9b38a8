#pragma once

#include "saci/numcore/matrix.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace saci::envs {

using numcore::Vector;

/// Exact elementwise equality; false on a length mismatch.
inline bool same_values(const Vector& a, const Vector& b)
{
    return a.size() == b.size() && (a.array() == b.array()).all();
}

enum class Cause { running, landed, crashed, hit_bomb, fell, finished, timeout };
enum class TrialKind { go, stop };

std::string_view to_string(Cause cause);
std::string_view to_string(TrialKind kind);
Cause cause_from_string(std::string_view text);
TrialKind trial_kind_from_string(std::string_view text);

inline constexpr std::array<Cause, 7> kAllCauses{Cause::running, Cause::landed,  Cause::crashed,
                                                 Cause::hit_bomb, Cause::fell,   Cause::finished,
                                                 Cause::timeout};

/// Additive pieces of the environment reward. Inactive pieces stay at zero.
struct RewardComponents {
    double base = 0.0;
    double time_penalty = 0.0;
    double bomb_penalty = 0.0;
    double shaping = 0.0;
    double stuck = 0.0;
    double fall = 0.0;

    /// Fixed summation order; reward_raw is always produced by this function.
    double sum() const { return base + time_penalty + bomb_penalty + shaping + stuck + fall; }

    bool operator==(const RewardComponents&) const = default;
};

inline constexpr std::array<std::string_view, 6> kComponentNames{
    "base", "time_penalty", "bomb_penalty", "shaping", "stuck", "fall"};

double component(const RewardComponents& c, std::size_t index);
double& component(RewardComponents& c, std::size_t index);

struct StepInfo {
    bool bomb_present = false;
    std::optional<std::array<double, 2>> bomb_center;  // set iff bomb_present
    bool stuck = false;
    TrialKind trial_kind = TrialKind::go;

    bool operator==(const StepInfo&) const = default;
};

struct StepResult {
    Vector obs;
    double reward_raw = 0.0;
    RewardComponents components;
    bool done = false;
    Cause cause = Cause::running;
    StepInfo info;

    bool operator==(const StepResult& o) const
    {
        return same_values(obs, o.obs) && reward_raw == o.reward_raw &&
               components == o.components && done == o.done && cause == o.cause &&
               info == o.info;
    }
};

struct ResetResult {
    Vector obs;
    StepInfo info;

    bool operator==(const ResetResult& o) const
    {
        return same_values(obs, o.obs) && info == o.info;
    }
};

struct EnvSpec {
    std::size_t obs_dim = 0;
    std::size_t act_dim = 0;
    std::size_t max_steps = 0;
    std::string name;

    bool operator==(const EnvSpec&) const = default;
};

/// Thrown on contract misuse such as stepping a finished episode.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Reset/step contract shared by the built-in simulators and remote environments.
class Environment {
public:
    virtual ~Environment() = default;
    virtual const EnvSpec& spec() const = 0;
    /// Deterministic for a given seed; the seed also drives any in-episode randomness.
    virtual ResetResult reset(std::uint64_t seed) = 0;
    virtual StepResult step(const Vector& action) = 0;
};

/// Value placed in observation slots of an absent bomb or stop zone.
inline constexpr double kDummyObs = -1.0;

} // namespace saci::envs
