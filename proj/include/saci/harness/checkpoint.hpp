#pragma once

#include "saci/numcore/named_tensors.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace saci::harness {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr char kCheckpointMagic[4] = {'S', 'A', 'C', 'I'};
inline constexpr std::uint64_t kCheckpointVersion = 1;

/// Layout: magic, u64 version, u64 tensor count, then per tensor u64 name length, name
/// bytes and the tensor record; finally u64 config length and config text.
struct Checkpoint {
    numcore::NamedTensors tensors;
    std::string config_text;

    bool operator==(const Checkpoint&) const = default;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

} // namespace saci::harness
