#pragma once

#include "saci/envs/env.hpp"

#include <stdexcept>
#include <string>

namespace saci::bridge {

using numcore::Vector;

inline constexpr int kProtocolVersion = 1;

/// Malformed or unexpected traffic. `field` names the offending key when known and
/// `position` is the byte offset of a syntax error (0 otherwise).
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(const std::string& message, std::string field = {}, std::size_t position = 0)
        : std::runtime_error(message), field_(std::move(field)), position_(position)
    {
    }

    const std::string& field() const { return field_; }
    std::size_t position() const { return position_; }

private:
    std::string field_;
    std::size_t position_;
};

/// A message that cannot be represented on the wire (non-finite numbers).
class EncodeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Kind { hello, spec, reset, obs, step, result, close, error };

std::string_view to_string(Kind k);

/// One protocol message. Only the fields of its kind are meaningful:
///   hello: version          spec: spec           reset: seed
///   obs: obs, info          step: action         result: result
///   close: -                error: message
struct WireMessage {
    Kind kind = Kind::close;
    std::uint64_t seq = 0;
    int version = kProtocolVersion;
    envs::EnvSpec spec;
    std::uint64_t seed = 0;
    Vector obs;
    envs::StepInfo info;
    Vector action;
    envs::StepResult result;
    std::string message;

    /// Compares `kind`, `seq` and the fields of that kind.
    bool operator==(const WireMessage& o) const;
};

WireMessage make_hello(std::uint64_t seq);
WireMessage make_spec(std::uint64_t seq, const envs::EnvSpec& spec);
WireMessage make_reset(std::uint64_t seq, std::uint64_t seed);
WireMessage make_obs(std::uint64_t seq, const envs::ResetResult& r);
WireMessage make_step(std::uint64_t seq, const Vector& action);
WireMessage make_result(std::uint64_t seq, const envs::StepResult& r);
WireMessage make_close(std::uint64_t seq);
WireMessage make_error(std::uint64_t seq, const std::string& message);

/// One JSON object on one line (no trailing newline). Throws EncodeError on NaN or inf.
std::string encode(const WireMessage& msg);

/// Throws ProtocolError on syntax errors, unknown kinds, missing or mistyped fields.
/// A missing `seq` reads as 0.
WireMessage decode(const std::string& line);

} // namespace saci::bridge
