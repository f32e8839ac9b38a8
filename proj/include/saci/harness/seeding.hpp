#pragma once

#include "saci/numcore/random.hpp"

namespace saci::harness {

/// Stream k of a master seed: splitmix64(splitmix64(master) + k). Each component owns one
/// stream, so reseeding one leaves the others untouched.
enum class StreamId : std::uint64_t { env = 1, action = 2, sampler = 3, noise = 4, init = 5,
                                      inhibitor = 6, eval = 7 };

constexpr std::uint64_t stream_seed(std::uint64_t master, StreamId id)
{
    return numcore::splitmix64(numcore::splitmix64(master) + static_cast<std::uint64_t>(id));
}

struct Streams {
    numcore::Rng env;
    numcore::Rng action;
    numcore::Rng sampler;
    numcore::Rng noise;
    numcore::Rng inhibitor;
    std::uint64_t init_seed = 0;

    explicit Streams(std::uint64_t master)
        : env(stream_seed(master, StreamId::env)),
          action(stream_seed(master, StreamId::action)),
          sampler(stream_seed(master, StreamId::sampler)),
          noise(stream_seed(master, StreamId::noise)),
          inhibitor(stream_seed(master, StreamId::inhibitor)),
          init_seed(stream_seed(master, StreamId::init))
    {
    }
};

} // namespace saci::harness
