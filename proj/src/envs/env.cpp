#include "saci/envs/env.hpp"

namespace saci::envs {

std::string_view to_string(Cause cause)
{
    switch (cause) {
    case Cause::running: return "running";
    case Cause::landed: return "landed";
    case Cause::crashed: return "crashed";
    case Cause::hit_bomb: return "hit_bomb";
    case Cause::fell: return "fell";
    case Cause::finished: return "finished";
    case Cause::timeout: return "timeout";
    }
    return "running";
}

std::string_view to_string(TrialKind kind)
{
    return kind == TrialKind::go ? "go" : "stop";
}

Cause cause_from_string(std::string_view text)
{
    for (auto c : kAllCauses) {
        if (to_string(c) == text) {
            return c;
        }
    }
    throw std::invalid_argument("unknown termination cause '" + std::string(text) + "'");
}

TrialKind trial_kind_from_string(std::string_view text)
{
    if (text == "go") {
        return TrialKind::go;
    }
    if (text == "stop") {
        return TrialKind::stop;
    }
    throw std::invalid_argument("unknown trial kind '" + std::string(text) + "'");
}

double component(const RewardComponents& c, std::size_t index)
{
    return component(const_cast<RewardComponents&>(c), index);
}

double& component(RewardComponents& c, std::size_t index)
{
    switch (index) {
    case 0: return c.base;
    case 1: return c.time_penalty;
    case 2: return c.bomb_penalty;
    case 3: return c.shaping;
    case 4: return c.stuck;
    case 5: return c.fall;
    default: throw std::out_of_range("reward component index");
    }
}

} // namespace saci::envs
