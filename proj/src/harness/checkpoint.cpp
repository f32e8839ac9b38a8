#include "saci/harness/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace saci::harness {

namespace {

constexpr std::uint64_t kMaxNameLength = 4096;
constexpr std::uint64_t kMaxTensors = 1u << 16;
constexpr std::uint64_t kMaxConfigLength = 1u << 24;

void write_text(std::ostream& out, const std::string& s)
{
    numcore::write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_text(std::istream& in, std::uint64_t limit, const char* what)
{
    const auto n = numcore::read_u64(in);
    if (n > limit) {
        throw CheckpointError(std::string("checkpoint ") + what + " length is implausible");
    }
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) {
        throw CheckpointError(std::string("checkpoint truncated inside ") + what);
    }
    return s;
}

} // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt)
{
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    numcore::write_u64(out, kCheckpointVersion);
    numcore::write_u64(out, ckpt.tensors.size());
    for (const auto& [name, t] : ckpt.tensors.entries()) {
        write_text(out, name);
        numcore::write_tensor(out, t);
    }
    write_text(out, ckpt.config_text);
    if (!out) {
        throw CheckpointError("failed to write checkpoint");
    }
}

Checkpoint read_checkpoint(std::istream& in)
{
    char magic[4] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw CheckpointError("not a checkpoint (bad magic)");
    }
    Checkpoint ckpt;
    try {
        const auto version = numcore::read_u64(in);
        if (version != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
        }
        const auto count = numcore::read_u64(in);
        if (count > kMaxTensors) {
            throw CheckpointError("checkpoint tensor count is implausible");
        }
        for (std::uint64_t i = 0; i < count; ++i) {
            auto name = read_text(in, kMaxNameLength, "tensor name");
            if (ckpt.tensors.contains(name)) {
                throw CheckpointError("duplicate tensor '" + name + "'");
            }
            ckpt.tensors.put(std::move(name), numcore::read_tensor(in));
        }
        ckpt.config_text = read_text(in, kMaxConfigLength, "config");
    } catch (const CheckpointError&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw CheckpointError("cannot open '" + path + "' for writing");
    }
    write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open checkpoint '" + path + "'");
    }
    return read_checkpoint(in);
}

} // namespace saci::harness
