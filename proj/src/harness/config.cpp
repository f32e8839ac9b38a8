#include "saci/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace saci::harness {

using numcore::ConfigError;

std::string_view to_string(Algo a)
{
    return a == Algo::sac ? "sac" : "saci";
}

std::string_view to_string(Shaping s)
{
    switch (s) {
    case Shaping::none:
        return "none";
    case Shaping::proxy:
        return "proxy";
    case Shaping::conservative:
        return "conservative";
    }
    return "none";
}

sac::SacConfig TrainConfig::sac_config() const
{
    sac::SacConfig c;
    c.gamma = gamma;
    c.tau = tau;
    c.lr = lr;
    c.batch_size = batch_size;
    c.target_entropy = target_entropy;
    c.hidden = hidden;
    return c;
}

inhibitory::SaciConfig TrainConfig::saci_config() const
{
    inhibitory::SaciConfig c;
    c.base = sac_config();
    c.episodic_memory = episodic_memory;
    c.dual_alpha = dual_alpha;
    c.inhibitor_target_entropy = inhibitor_target_entropy;
    return c;
}

envs::EnvOptions TrainConfig::env_options() const
{
    envs::EnvOptions o;
    o.stop_prob = stop_prob;
    o.include_fall = include_fall;
    o.include_stuck = include_stuck;
    o.max_steps = max_steps;
    o.stall_limit = stall_limit;
    return o;
}

void validate(const TrainConfig& cfg)
{
    auto require = [](bool ok, const char* msg) {
        if (!ok) {
            throw ConfigError(msg);
        }
    };
    const auto names = envs::builtin_env_names();
    require(std::find(names.begin(), names.end(), cfg.env) != names.end(),
            "run.env must be stopgo, lander or runner");
    require(cfg.episodes >= 1, "run.episodes must be at least 1");
    require(cfg.batch_size >= 1, "agent.batch_size must be at least 1");
    require(cfg.lr > 0.0, "agent.lr must be positive");
    require(cfg.gamma >= 0.0 && cfg.gamma < 1.0, "agent.gamma must lie in [0,1)");
    require(cfg.tau >= 0.0 && cfg.tau <= 1.0, "agent.tau must lie in [0,1]");
    require(!cfg.hidden.empty(), "agent.hidden needs at least one layer");
    for (auto h : cfg.hidden) {
        require(h >= 1, "agent.hidden widths must be positive");
    }
    require(cfg.replay_capacity >= cfg.batch_size, "agent.replay_capacity below batch size");
    require(cfg.stop_prob >= 0.0 && cfg.stop_prob <= 1.0, "env.stop_prob must lie in [0,1]");
    require(cfg.stall_limit >= 1, "env.stall_limit must be at least 1");
    require(!(cfg.inhibition == inhibitory::InhibitionMode::soft_modulator && cfg.env != "runner"),
            "saci.inhibition = soft_modulator needs the runner environment");
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("'" + key + "': expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError("'" + key + "': expected true or false, got '" + v + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v)
{
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_u64(key, trim(item)));
    }
    if (out.empty()) {
        throw ConfigError("'" + key + "': expected a comma-separated list of widths");
    }
    return out;
}

std::string format_sizes(const std::vector<std::size_t>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + std::to_string(v[i]);
    }
    return out;
}

struct Field {
    const char* section;
    const char* key;
    std::function<std::string(const TrainConfig&)> get;
    std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
};

template <typename T>
Field size_field(const char* section, const char* key, T TrainConfig::*m)
{
    return {section, key, [m](const TrainConfig& c) { return std::to_string(c.*m); },
            [m](TrainConfig& c, const std::string& k, const std::string& v) {
                c.*m = static_cast<T>(parse_u64(k, v));
            }};
}

Field real_field(const char* section, const char* key, double TrainConfig::*m)
{
    return {section, key, [m](const TrainConfig& c) { return envs::format_double(c.*m); },
            [m](TrainConfig& c, const std::string& k, const std::string& v) {
                c.*m = parse_double(k, v);
            }};
}

Field bool_field(const char* section, const char* key, bool TrainConfig::*m)
{
    return {section, key, [m](const TrainConfig& c) { return std::string(c.*m ? "true" : "false"); },
            [m](TrainConfig& c, const std::string& k, const std::string& v) {
                c.*m = parse_bool(k, v);
            }};
}

Field text_field(const char* section, const char* key, std::string TrainConfig::*m)
{
    return {section, key, [m](const TrainConfig& c) { return c.*m; },
            [m](TrainConfig& c, const std::string&, const std::string& v) { c.*m = v; }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        {"run", "algo", [](const TrainConfig& c) { return std::string(to_string(c.algo)); },
         [](TrainConfig& c, const std::string& k, const std::string& v) {
             if (v == "sac") {
                 c.algo = Algo::sac;
             } else if (v == "saci") {
                 c.algo = Algo::saci;
             } else {
                 throw ConfigError("'" + k + "': expected sac or saci, got '" + v + "'");
             }
         }},
        text_field("run", "env", &TrainConfig::env),
        size_field("run", "episodes", &TrainConfig::episodes),
        size_field("run", "max_total_steps", &TrainConfig::max_total_steps),
        size_field("run", "seed", &TrainConfig::seed),
        size_field("run", "random_steps", &TrainConfig::random_steps),
        size_field("agent", "batch_size", &TrainConfig::batch_size),
        real_field("agent", "lr", &TrainConfig::lr),
        real_field("agent", "gamma", &TrainConfig::gamma),
        real_field("agent", "tau", &TrainConfig::tau),
        real_field("agent", "target_entropy", &TrainConfig::target_entropy),
        {"agent", "hidden", [](const TrainConfig& c) { return format_sizes(c.hidden); },
         [](TrainConfig& c, const std::string& k, const std::string& v) {
             c.hidden = parse_sizes(k, v);
         }},
        size_field("agent", "replay_capacity", &TrainConfig::replay_capacity),
        real_field("env", "stop_prob", &TrainConfig::stop_prob),
        size_field("env", "max_steps", &TrainConfig::max_steps),
        bool_field("env", "include_fall", &TrainConfig::include_fall),
        bool_field("env", "include_stuck", &TrainConfig::include_stuck),
        size_field("env", "stall_limit", &TrainConfig::stall_limit),
        {"saci", "shaping", [](const TrainConfig& c) { return std::string(to_string(c.shaping)); },
         [](TrainConfig& c, const std::string& k, const std::string& v) {
             for (auto s : {Shaping::none, Shaping::proxy, Shaping::conservative}) {
                 if (v == to_string(s)) {
                     c.shaping = s;
                     return;
                 }
             }
             throw ConfigError("'" + k + "': expected none, proxy or conservative");
         }},
        {"saci", "inhibition",
         [](const TrainConfig& c) { return std::string(inhibitory::to_string(c.inhibition)); },
         [](TrainConfig& c, const std::string&, const std::string& v) {
             c.inhibition = inhibitory::inhibition_mode_from_string(v);
         }},
        bool_field("saci", "episodic_memory", &TrainConfig::episodic_memory),
        bool_field("saci", "dual_alpha", &TrainConfig::dual_alpha),
        size_field("saci", "warmup_episodes", &TrainConfig::warmup_episodes),
        real_field("saci", "inhibitor_target_entropy", &TrainConfig::inhibitor_target_entropy),
        text_field("checkpoint", "load", &TrainConfig::load),
        bool_field("checkpoint", "load_twin_i", &TrainConfig::load_twin_i),
        text_field("checkpoint", "save", &TrainConfig::save),
        size_field("checkpoint", "save_every", &TrainConfig::save_every),
        text_field("log", "metrics", &TrainConfig::metrics),
    };
    return table;
}

void assign(TrainConfig& cfg, const std::string& section, const std::string& key,
            const std::string& value)
{
    for (const auto& f : fields()) {
        if (section == f.section && key == f.key) {
            f.set(cfg, section + "." + key, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + section + "." + key + "'");
}

} // namespace

TrainConfig parse_config(const std::string& text)
{
    return parse_config(text, TrainConfig{});
}

TrainConfig parse_config(const std::string& text, TrainConfig cfg)
{
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(std::string_view(body).substr(0, eq));
        const auto value = trim(std::string_view(body).substr(eq + 1));
        std::string sec = section;
        if (const auto dot = key.find('.'); dot != std::string::npos && section.empty()) {
            sec = key.substr(0, dot);
            key = key.substr(dot + 1);
        }
        try {
            assign(cfg, sec, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

std::string format_config(const TrainConfig& cfg)
{
    std::ostringstream out;
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) {
                out << '\n';
            }
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(cfg) << '\n';
    }
    return out.str();
}

void apply_override(TrainConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    const auto lhs = trim(std::string_view(assignment).substr(0, eq));
    const auto dot = lhs.find('.');
    if (eq == std::string::npos || dot == std::string::npos) {
        throw ConfigError("override must look like section.key=value: '" + assignment + "'");
    }
    assign(cfg, lhs.substr(0, dot), lhs.substr(dot + 1),
           trim(std::string_view(assignment).substr(eq + 1)));
}

TrainConfig load_config_file(const std::string& path)
{
    return load_config_file(path, TrainConfig{});
}

TrainConfig load_config_file(const std::string& path, TrainConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::vector<std::string> preset_names()
{
    return {"stopgo",         "lander-baseline", "lander-bomb-retrain", "lander-ablation",
            "runner-baseline", "runner-hardcore", "runner-mixed"};
}

TrainConfig preset(const std::string& name)
{
    TrainConfig c;
    if (name == "stopgo") {
        c.env = "stopgo";
        c.episodes = 400;
        c.max_total_steps = 30000;
        c.shaping = Shaping::none;
    } else if (name == "lander-baseline") {
        c.algo = Algo::sac;
        c.stop_prob = 0.0;
        c.shaping = Shaping::none;
        c.save = "lander-baseline.ckpt";
    } else if (name == "lander-bomb-retrain") {
        c.stop_prob = 0.5;
        c.load = "lander-baseline.ckpt";
        c.save = "lander-bomb-retrain.ckpt";
    } else if (name == "lander-ablation") {
        c.stop_prob = 0.5;
        c.episodic_memory = false;
        c.dual_alpha = false;
        c.load = "lander-baseline.ckpt";
        c.save = "lander-ablation.ckpt";
    } else if (name == "runner-baseline" || name == "runner-hardcore" || name == "runner-mixed") {
        c.env = "runner";
        c.episodes = 3000;
        c.batch_size = 128;
        c.hidden = {256, 256};
        c.include_fall = false;
        c.include_stuck = true;
        c.shaping = Shaping::none;
        c.warmup_episodes = 100;
        if (name == "runner-baseline") {
            c.algo = Algo::sac;
            c.stop_prob = 0.0;
            c.save = "runner-baseline.ckpt";
        } else {
            c.stop_prob = name == "runner-hardcore" ? 1.0 : 0.9;
            c.load = "runner-baseline.ckpt";
            c.load_twin_i = true;
            c.save = name + ".ckpt";
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return c;
}

} // namespace saci::harness
