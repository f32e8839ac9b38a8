#pragma once

#include <filesystem>
#include <string>

namespace saci::acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    std::filesystem::path work_dir;  // cached training runs live here
    bool verbose = false;
};

Outcome gradient_oracle(const Context& ctx);
Outcome squashed_density(const Context& ctx);
Outcome partition_exactness(const Context& ctx);
Outcome sac_equivalence(const Context& ctx);
Outcome temperature_dynamics(const Context& ctx);
Outcome stopgo_learning(const Context& ctx);
Outcome retraining_advantage(const Context& ctx);
Outcome bomb_frequency_ordering(const Context& ctx);
Outcome mixed_runner(const Context& ctx);
Outcome stuck_reward_oracle(const Context& ctx);
Outcome bridge_conformance(const Context& ctx);
Outcome checkpoint_round_trip(const Context& ctx);

} // namespace saci::acceptance
