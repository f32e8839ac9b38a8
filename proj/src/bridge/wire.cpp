#include "saci/bridge/wire.hpp"

#include <json.hpp>

#include <cmath>

namespace saci::bridge {

using json = nlohmann::json;

std::string_view to_string(Kind k)
{
    switch (k) {
    case Kind::hello:
        return "hello";
    case Kind::spec:
        return "spec";
    case Kind::reset:
        return "reset";
    case Kind::obs:
        return "obs";
    case Kind::step:
        return "step";
    case Kind::result:
        return "result";
    case Kind::close:
        return "close";
    case Kind::error:
        return "error";
    }
    return "error";
}

bool WireMessage::operator==(const WireMessage& o) const
{
    if (kind != o.kind || seq != o.seq) {
        return false;
    }
    switch (kind) {
    case Kind::hello:
        return version == o.version;
    case Kind::spec:
        return spec == o.spec;
    case Kind::reset:
        return seed == o.seed;
    case Kind::obs:
        return envs::same_values(obs, o.obs) && info == o.info;
    case Kind::step:
        return envs::same_values(action, o.action);
    case Kind::result:
        return result == o.result;
    case Kind::close:
        return true;
    case Kind::error:
        return message == o.message;
    }
    return false;
}

WireMessage make_hello(std::uint64_t seq)
{
    WireMessage m;
    m.kind = Kind::hello;
    m.seq = seq;
    return m;
}

WireMessage make_spec(std::uint64_t seq, const envs::EnvSpec& spec)
{
    WireMessage m;
    m.kind = Kind::spec;
    m.seq = seq;
    m.spec = spec;
    return m;
}

WireMessage make_reset(std::uint64_t seq, std::uint64_t seed)
{
    WireMessage m;
    m.kind = Kind::reset;
    m.seq = seq;
    m.seed = seed;
    return m;
}

WireMessage make_obs(std::uint64_t seq, const envs::ResetResult& r)
{
    WireMessage m;
    m.kind = Kind::obs;
    m.seq = seq;
    m.obs = r.obs;
    m.info = r.info;
    return m;
}

WireMessage make_step(std::uint64_t seq, const Vector& action)
{
    WireMessage m;
    m.kind = Kind::step;
    m.seq = seq;
    m.action = action;
    return m;
}

WireMessage make_result(std::uint64_t seq, const envs::StepResult& r)
{
    WireMessage m;
    m.kind = Kind::result;
    m.seq = seq;
    m.result = r;
    return m;
}

WireMessage make_close(std::uint64_t seq)
{
    WireMessage m;
    m.kind = Kind::close;
    m.seq = seq;
    return m;
}

WireMessage make_error(std::uint64_t seq, const std::string& message)
{
    WireMessage m;
    m.kind = Kind::error;
    m.seq = seq;
    m.message = message;
    return m;
}

namespace {

double finite(double x, const char* field)
{
    if (!std::isfinite(x)) {
        throw EncodeError(std::string("non-finite value in '") + field + "'");
    }
    return x;
}

json vector_json(const Vector& v, const char* field)
{
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(finite(v(i), field));
    }
    return arr;
}

json info_json(const envs::StepInfo& info)
{
    json j;
    j["bomb_present"] = info.bomb_present;
    if (info.bomb_center) {
        j["bomb_center"] = {finite((*info.bomb_center)[0], "info.bomb_center"),
                            finite((*info.bomb_center)[1], "info.bomb_center")};
    } else {
        j["bomb_center"] = nullptr;
    }
    j["stuck"] = info.stuck;
    j["trial_kind"] = std::string(envs::to_string(info.trial_kind));
    return j;
}

const json& field(const json& j, const char* name)
{
    const auto it = j.find(name);
    if (it == j.end()) {
        throw ProtocolError(std::string("missing field '") + name + "'", name);
    }
    return *it;
}

double number(const json& j, const char* name)
{
    if (!j.is_number()) {
        throw ProtocolError(std::string("field '") + name + "' must be a number", name);
    }
    return j.get<double>();
}

std::uint64_t unsigned_number(const json& j, const char* name)
{
    if (!j.is_number_unsigned()) {
        throw ProtocolError(std::string("field '") + name + "' must be a non-negative integer",
                            name);
    }
    return j.get<std::uint64_t>();
}

bool boolean(const json& j, const char* name)
{
    if (!j.is_boolean()) {
        throw ProtocolError(std::string("field '") + name + "' must be true or false", name);
    }
    return j.get<bool>();
}

std::string text(const json& j, const char* name)
{
    if (!j.is_string()) {
        throw ProtocolError(std::string("field '") + name + "' must be a string", name);
    }
    return j.get<std::string>();
}

Vector vector_field(const json& j, const char* name)
{
    if (!j.is_array()) {
        throw ProtocolError(std::string("field '") + name + "' must be an array", name);
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number(j[i], name);
    }
    return v;
}

envs::StepInfo info_field(const json& j)
{
    if (!j.is_object()) {
        throw ProtocolError("field 'info' must be an object", "info");
    }
    envs::StepInfo info;
    info.bomb_present = boolean(field(j, "bomb_present"), "info.bomb_present");
    const auto& center = field(j, "bomb_center");
    if (!center.is_null()) {
        if (!center.is_array() || center.size() != 2) {
            throw ProtocolError("field 'info.bomb_center' must be null or two numbers",
                                "info.bomb_center");
        }
        info.bomb_center = std::array<double, 2>{number(center[0], "info.bomb_center"),
                                                 number(center[1], "info.bomb_center")};
    }
    if (info.bomb_center.has_value() != info.bomb_present) {
        throw ProtocolError("bomb_center must be present exactly when bomb_present is true",
                            "info.bomb_center");
    }
    info.stuck = boolean(field(j, "stuck"), "info.stuck");
    try {
        info.trial_kind = envs::trial_kind_from_string(text(field(j, "trial_kind"), "info.trial_kind"));
    } catch (const ProtocolError&) {
        throw;
    } catch (const std::exception&) {
        throw ProtocolError("field 'info.trial_kind' must be go or stop", "info.trial_kind");
    }
    return info;
}

} // namespace

std::string encode(const WireMessage& msg)
{
    json j;
    j["kind"] = std::string(to_string(msg.kind));
    j["seq"] = msg.seq;
    switch (msg.kind) {
    case Kind::hello:
        j["version"] = msg.version;
        break;
    case Kind::spec:
        j["obs_dim"] = msg.spec.obs_dim;
        j["act_dim"] = msg.spec.act_dim;
        j["max_steps"] = msg.spec.max_steps;
        j["name"] = msg.spec.name;
        break;
    case Kind::reset:
        j["seed"] = msg.seed;
        break;
    case Kind::obs:
        j["obs"] = vector_json(msg.obs, "obs");
        j["info"] = info_json(msg.info);
        break;
    case Kind::step:
        j["action"] = vector_json(msg.action, "action");
        break;
    case Kind::result: {
        const auto& r = msg.result;
        j["obs"] = vector_json(r.obs, "obs");
        j["reward_raw"] = finite(r.reward_raw, "reward_raw");
        json comps;
        for (std::size_t i = 0; i < envs::kComponentNames.size(); ++i) {
            comps[std::string(envs::kComponentNames[i])] =
                finite(envs::component(r.components, i), "components");
        }
        j["components"] = comps;
        j["done"] = r.done;
        j["cause"] = std::string(envs::to_string(r.cause));
        j["info"] = info_json(r.info);
        break;
    }
    case Kind::close:
        break;
    case Kind::error:
        j["message"] = msg.message;
        break;
    }
    // invalid UTF-8 in names or messages is replaced rather than rejected
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

WireMessage decode(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what(), {}, e.byte);
    }
    if (!j.is_object()) {
        throw ProtocolError("message must be a JSON object");
    }
    const auto kind_text = text(field(j, "kind"), "kind");
    WireMessage m;
    bool known = false;
    for (auto k : {Kind::hello, Kind::spec, Kind::reset, Kind::obs, Kind::step, Kind::result,
                   Kind::close, Kind::error}) {
        if (kind_text == to_string(k)) {
            m.kind = k;
            known = true;
        }
    }
    if (!known) {
        throw ProtocolError("unknown message kind '" + kind_text + "'", "kind");
    }
    if (const auto it = j.find("seq"); it != j.end()) {
        m.seq = unsigned_number(*it, "seq");
    }
    switch (m.kind) {
    case Kind::hello: {
        const auto& v = field(j, "version");
        if (!v.is_number_integer()) {
            throw ProtocolError("field 'version' must be an integer", "version");
        }
        m.version = v.get<int>();
        break;
    }
    case Kind::spec:
        m.spec.obs_dim = unsigned_number(field(j, "obs_dim"), "obs_dim");
        m.spec.act_dim = unsigned_number(field(j, "act_dim"), "act_dim");
        m.spec.max_steps = unsigned_number(field(j, "max_steps"), "max_steps");
        m.spec.name = text(field(j, "name"), "name");
        break;
    case Kind::reset:
        m.seed = unsigned_number(field(j, "seed"), "seed");
        break;
    case Kind::obs:
        m.obs = vector_field(field(j, "obs"), "obs");
        m.info = info_field(field(j, "info"));
        break;
    case Kind::step:
        m.action = vector_field(field(j, "action"), "action");
        break;
    case Kind::result: {
        auto& r = m.result;
        r.obs = vector_field(field(j, "obs"), "obs");
        r.reward_raw = number(field(j, "reward_raw"), "reward_raw");
        const auto& comps = field(j, "components");
        if (!comps.is_object()) {
            throw ProtocolError("field 'components' must be an object", "components");
        }
        for (std::size_t i = 0; i < envs::kComponentNames.size(); ++i) {
            const std::string name(envs::kComponentNames[i]);
            if (const auto it = comps.find(name); it != comps.end()) {
                envs::component(r.components, i) = number(*it, "components");
            }
        }
        r.done = boolean(field(j, "done"), "done");
        try {
            r.cause = envs::cause_from_string(text(field(j, "cause"), "cause"));
        } catch (const ProtocolError&) {
            throw;
        } catch (const std::exception&) {
            throw ProtocolError("unknown cause", "cause");
        }
        r.info = info_field(field(j, "info"));
        break;
    }
    case Kind::close:
        break;
    case Kind::error:
        m.message = text(field(j, "message"), "message");
        break;
    }
    return m;
}

} // namespace saci::bridge
