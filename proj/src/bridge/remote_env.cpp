#include "saci/bridge/remote_env.hpp"

namespace saci::bridge {

RemoteEnv::RemoteEnv(std::unique_ptr<Transport> transport, Millis timeout)
    : transport_(std::move(transport)), timeout_(timeout)
{
    if (!transport_) {
        throw std::invalid_argument("RemoteEnv needs a transport");
    }
    const auto reply = request(make_hello(seq_), Kind::spec);
    spec_ = reply.spec;
    if (spec_.obs_dim == 0 || spec_.act_dim == 0 || spec_.max_steps == 0) {
        broken_ = true;
        throw ProtocolError("spec has a zero dimension or step limit", "spec");
    }
}

RemoteEnv::~RemoteEnv()
{
    try {
        close();
    } catch (...) {
    }
}

void RemoteEnv::close()
{
    if (!transport_) {
        return;
    }
    if (!broken_) {
        try {
            transport_->send_line(encode(make_close(++seq_)));
        } catch (const TransportError&) {
        }
    }
    transport_->close();
    transport_.reset();
}

WireMessage RemoteEnv::request(const WireMessage& msg, Kind expected)
{
    if (!transport_ || broken_) {
        throw TransportError("remote environment is closed");
    }
    // any failure below leaves the stream in an unknown state
    broken_ = true;
    transport_->send_line(encode(msg));
    const auto line = transport_->recv_line(timeout_);
    if (!line) {
        throw TransportError("remote environment closed the connection");
    }
    auto reply = decode(*line);
    if (reply.seq != msg.seq) {
        throw ProtocolError("reply sequence " + std::to_string(reply.seq) + " does not match request " +
                                std::to_string(msg.seq),
                            "seq");
    }
    if (reply.kind == Kind::error) {
        throw ProtocolError("remote error: " + reply.message);
    }
    if (reply.kind != expected) {
        throw ProtocolError("expected '" + std::string(to_string(expected)) + "' reply, got '" +
                                std::string(to_string(reply.kind)) + "'",
                            "kind");
    }
    broken_ = false;
    return reply;
}

void RemoteEnv::check_obs(const Vector& obs) const
{
    if (static_cast<std::size_t>(obs.size()) != spec_.obs_dim) {
        throw ProtocolError("observation has " + std::to_string(obs.size()) + " values, spec says " +
                                std::to_string(spec_.obs_dim),
                            "obs");
    }
}

envs::ResetResult RemoteEnv::reset(std::uint64_t seed)
{
    auto reply = request(make_reset(++seq_, seed), Kind::obs);
    if (static_cast<std::size_t>(reply.obs.size()) != spec_.obs_dim) {
        broken_ = true;
        check_obs(reply.obs);
    }
    in_episode_ = true;
    return {std::move(reply.obs), reply.info};
}

envs::StepResult RemoteEnv::step(const Vector& action)
{
    if (!in_episode_) {
        throw envs::UsageError("remote: step called on a finished episode; call reset first");
    }
    if (static_cast<std::size_t>(action.size()) != spec_.act_dim) {
        throw envs::UsageError("remote: action must have " + std::to_string(spec_.act_dim) +
                               " elements");
    }
    in_episode_ = false;
    auto reply = request(make_step(++seq_, action), Kind::result);
    if (static_cast<std::size_t>(reply.result.obs.size()) != spec_.obs_dim) {
        broken_ = true;
        check_obs(reply.result.obs);
    }
    in_episode_ = !reply.result.done;
    return std::move(reply.result);
}

std::size_t serve_env(envs::Environment& env, Transport& transport)
{
    std::size_t handled = 0;
    for (;;) {
        const auto line = transport.recv_line(Millis{-1});
        if (!line) {
            return handled;
        }
        ++handled;
        WireMessage reply;
        std::uint64_t seq = 0;
        try {
            const auto msg = decode(*line);
            seq = msg.seq;
            switch (msg.kind) {
            case Kind::hello:
                if (msg.version != kProtocolVersion) {
                    reply = make_error(seq, "unsupported protocol version " +
                                                std::to_string(msg.version));
                } else {
                    reply = make_spec(seq, env.spec());
                }
                break;
            case Kind::reset:
                reply = make_obs(seq, env.reset(msg.seed));
                break;
            case Kind::step:
                reply = make_result(seq, env.step(msg.action));
                break;
            case Kind::close:
                return handled;
            default:
                reply = make_error(seq, "unexpected '" + std::string(to_string(msg.kind)) +
                                            "' request");
                break;
            }
            transport.send_line(encode(reply));
        } catch (const TransportError&) {
            throw;
        } catch (const std::exception& e) {
            transport.send_line(encode(make_error(seq, e.what())));
        }
    }
}

} // namespace saci::bridge
