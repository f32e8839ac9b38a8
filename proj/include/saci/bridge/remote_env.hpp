#pragma once

#include "saci/bridge/transport.hpp"
#include "saci/bridge/wire.hpp"

namespace saci::bridge {

/// Environment whose reset/step calls are served by a peer speaking the wire protocol.
/// The handshake runs in the constructor. Request n carries sequence number n and its reply
/// must echo it. Any timeout, protocol violation or close aborts the episode with an error;
/// the adapter can then only be discarded.
class RemoteEnv : public envs::Environment {
public:
    explicit RemoteEnv(std::unique_ptr<Transport> transport, Millis timeout = kDefaultTimeout);
    ~RemoteEnv() override;

    const envs::EnvSpec& spec() const override { return spec_; }
    envs::ResetResult reset(std::uint64_t seed) override;
    envs::StepResult step(const Vector& action) override;

    /// Sends `close` and releases the transport. Idempotent.
    void close();

private:
    WireMessage request(const WireMessage& msg, Kind expected);
    void check_obs(const Vector& obs) const;

    std::unique_ptr<Transport> transport_;
    Millis timeout_;
    envs::EnvSpec spec_;
    std::uint64_t seq_ = 0;
    bool in_episode_ = false;
    bool broken_ = false;
};

/// Serves `env` until the peer sends `close` or disconnects. Bad requests get an `error`
/// reply and the loop continues. Returns the number of requests handled.
std::size_t serve_env(envs::Environment& env, Transport& transport);

} // namespace saci::bridge
