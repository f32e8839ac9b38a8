#include "saci/harness/trainer.hpp"

#include "saci/envs/lander_bomb.hpp"
#include "saci/envs/shaping.hpp"

#include <cmath>
#include <fstream>

namespace saci::harness {

using envs::Cause;
using inhibitory::Branch;

inhibitory::InhibitionRule default_rule(const std::string& env, Shaping shaping)
{
    if (env == "lander") {
        return shaping == Shaping::conservative ? envs::lander_conservative_rule
                                                : envs::lander_proximity_rule;
    }
    if (env == "stopgo") {
        return envs::stopgo_zone_rule;
    }
    if (env == "runner") {
        return envs::runner_stuck_rule;
    }
    return [](const Vector&, const envs::StepInfo&) { return false; };
}

double shaping_reward(Shaping shaping, const std::string& env, const Vector& obs,
                      const envs::StepInfo& info)
{
    if (shaping == Shaping::none || env != "lander" || !info.bomb_center) {
        return 0.0;
    }
    if (shaping == Shaping::proxy) {
        if (!envs::lander_proximity_rule(obs, info)) {
            return 0.0;
        }
        const auto [xb, yb] = *info.bomb_center;
        return envs::bomb_proxy_shaping(
            std::hypot(obs(envs::LanderObs::x) - xb, obs(envs::LanderObs::y) - yb));
    }
    if (!envs::lander_conservative_rule(obs, info)) {
        return 0.0;
    }
    return envs::conservative_shaping(obs, *info.bomb_center);
}

numcore::NamedTensors as_sac_tensors(const numcore::NamedTensors& table)
{
    numcore::NamedTensors out;
    for (const auto& [name, t] : table.entries()) {
        if (name.rfind("policy.", 0) == 0) {
            out.put(name, t);
        } else if (name.rfind("twin_r.", 0) == 0) {
            out.put(name.substr(7), t);
        } else if (name == "log_alpha_r") {
            out.put("log_alpha", t);
        }
    }
    return out;
}

Trainer::Trainer(TrainConfig cfg, std::unique_ptr<envs::Environment> env)
    : cfg_(std::move(cfg)), streams_(cfg_.seed)
{
    validate(cfg_);
    env_ = env ? std::move(env) : envs::make_env(cfg_.env, cfg_.env_options());
    rule_ = default_rule(cfg_.env, cfg_.shaping);
    const auto& spec = env_->spec();
    if (cfg_.algo == Algo::sac) {
        sac_ = sac::make_sac_agent(spec.obs_dim, spec.act_dim, cfg_.sac_config(),
                                   streams_.init_seed);
        sac_replay_.emplace(cfg_.replay_capacity);
    } else {
        const auto scfg = cfg_.saci_config();
        saci_ = inhibitory::make_saci_agent(spec.obs_dim, spec.act_dim, scfg, streams_.init_seed);
        partition_.emplace(cfg_.replay_capacity, cfg_.episodic_memory);
        if (cfg_.inhibition != inhibitory::InhibitionMode::rule) {
            saci_->inhibitor = inhibitory::make_inhibitory_policy(
                cfg_.inhibition, spec.obs_dim, scfg.inhibitor_config(),
                numcore::splitmix64(streams_.init_seed + 41), cfg_.warmup_episodes);
        }
    }
    if (!cfg_.load.empty()) {
        load(load_checkpoint(cfg_.load));
    }
}

void Trainer::load(const Checkpoint& ckpt)
{
    try {
        if (sac_) {
            sac::import_tensors(*sac_, ckpt.tensors.contains("q1.w0")
                                           ? ckpt.tensors
                                           : as_sac_tensors(ckpt.tensors));
        } else {
            inhibitory::retrain_from(*saci_, ckpt.tensors, cfg_.load_twin_i);
        }
    } catch (const numcore::ShapeError& e) {
        throw CheckpointError(std::string("checkpoint does not fit this agent: ") + e.what());
    }
}

const sac::GaussianPolicy& Trainer::policy() const
{
    return sac_ ? sac_->policy : saci_->policy;
}

bool Trainer::finished() const
{
    return episodes_ >= cfg_.episodes ||
           (cfg_.max_total_steps != 0 && total_steps_ >= cfg_.max_total_steps);
}

MetricsRecord Trainer::run_episode()
{
    const auto& spec = env_->spec();
    const auto act_dim = static_cast<Eigen::Index>(spec.act_dim);
    const auto start = env_->reset(streams_.env());
    Vector obs = start.obs;
    envs::StepInfo info = start.info;

    MetricsRecord rec;
    rec.trial_kind = start.info.trial_kind;
    std::size_t updates = 0;
    auto track = [&](double q_r, double q_i, double pi, double a_r, double a_i) {
        rec.loss_q_r += q_r;
        rec.loss_q_i += q_i;
        rec.loss_pi += pi;
        rec.loss_alpha_r += a_r;
        rec.loss_alpha_i += a_i;
        ++updates;
    };

    for (;;) {
        Vector action(act_dim);
        if (total_steps_ < cfg_.random_steps) {
            for (Eigen::Index j = 0; j < act_dim; ++j) {
                action(j) = numcore::uniform(streams_.action, -1.0, 1.0);
            }
        } else {
            const Vector noise = numcore::standard_normal(act_dim, 1, streams_.action).col(0);
            action = sac::sample_action(policy(), obs, noise).action;
        }

        inhibitory::Classification cls;
        if (saci_ && saci_->inhibitor) {
            const Vector noise = numcore::standard_normal(1, 1, streams_.inhibitor).col(0);
            cls = inhibitory::classify_state(*saci_->inhibitor, rule_, obs, info, &noise);
        } else if (saci_) {
            cls.branch = inhibitory::classify_state(rule_, obs, info);
        }

        const auto res = env_->step(action);
        const double shaped =
            res.reward_raw + shaping_reward(cfg_.shaping, cfg_.env, obs, info);
        // timeouts truncate rather than terminate
        const bool terminal = res.done && res.cause != Cause::timeout;

        if (sac_) {
            sac_replay_->push(sac::Experience{obs, action, shaped, res.obs, terminal});
            if (auto m = sac::sac_update_step(*sac_, *sac_replay_, cfg_.sac_config(),
                                              streams_.sampler, streams_.noise)) {
                track(m->q_loss, 0.0, m->policy_loss, m->alpha_loss, 0.0);
            }
        } else {
            inhibitory::Transition t;
            t.state = obs;
            t.action = action;
            t.branch = cls.branch;
            t.reward_raw = res.reward_raw;
            if (cls.branch == Branch::R) {
                t.reward = res.reward_raw;
            } else {
                t.reward = shaped;
                if (cfg_.inhibition == inhibitory::InhibitionMode::soft_modulator) {
                    t.reward -= (1.0 - cls.weight) * res.components.stuck;
                }
            }
            t.next_state = res.obs;
            t.done = terminal;
            t.inhibitor_action = cls.inhibitor_action;
            partition_->push(std::move(t));
            if (auto m = inhibitory::saci_update_step(
                    *saci_, *partition_, cfg_.saci_config(),
                    {streams_.sampler, streams_.noise, streams_.inhibitor}, episodes_)) {
                track(m->q_loss_r.value_or(0.0), m->q_loss_i.value_or(0.0), m->policy_loss,
                      m->alpha_loss_r, m->alpha_loss_i);
            }
        }

        ++total_steps_;
        rec.episode_reward_raw += res.reward_raw;
        if (res.done) {
            rec.cause = res.cause;
            break;
        }
        obs = res.obs;
        info = res.info;
    }

    if (updates > 0) {
        const double n = static_cast<double>(updates);
        rec.loss_q_r /= n;
        rec.loss_q_i /= n;
        rec.loss_pi /= n;
        rec.loss_alpha_r /= n;
        rec.loss_alpha_i /= n;
    }
    for (std::size_t k = 0; k < kTalliedCauses.size(); ++k) {
        if (kTalliedCauses[k] == rec.cause) {
            ++cause_counts_[k];
        }
    }
    rec.cause_counts = cause_counts_;
    rec.episode = episodes_++;
    rec.step = total_steps_;
    rec.avg100 = avg_.push(rec.episode_reward_raw);
    if (sac_) {
        rec.alpha_r = rec.alpha_i = sac_->temp.alpha();
        rec.fill_r = sac_replay_->size();
    } else {
        rec.alpha_r = saci_->alpha(Branch::R);
        rec.alpha_i = saci_->alpha(Branch::I);
        rec.fill_r = partition_->fill(Branch::R);
        rec.fill_i = partition_->fill(Branch::I);
    }
    return rec;
}

std::vector<MetricsRecord> Trainer::run(const std::function<void(const MetricsRecord&)>& on_episode)
{
    std::ofstream metrics;
    if (!cfg_.metrics.empty()) {
        metrics.open(cfg_.metrics, std::ios::trunc);
        if (!metrics) {
            throw std::runtime_error("cannot write metrics file '" + cfg_.metrics + "'");
        }
        write_metrics_header(metrics);
    }
    std::vector<MetricsRecord> records;
    while (!finished()) {
        records.push_back(run_episode());
        const auto& rec = records.back();
        if (metrics.is_open()) {
            write_metrics_row(metrics, rec);
            metrics.flush();
        }
        if (on_episode) {
            on_episode(rec);
        }
        if (!cfg_.save.empty() && cfg_.save_every != 0 && episodes_ % cfg_.save_every == 0) {
            save_checkpoint(cfg_.save, checkpoint());
        }
    }
    if (!cfg_.save.empty()) {
        save_checkpoint(cfg_.save, checkpoint());
    }
    return records;
}

Checkpoint Trainer::checkpoint() const
{
    Checkpoint ckpt;
    ckpt.tensors = sac_ ? sac::export_tensors(*sac_) : inhibitory::export_tensors(*saci_);
    ckpt.config_text = format_config(cfg_);
    return ckpt;
}

sac::GaussianPolicy policy_from_checkpoint(const Checkpoint& ckpt, const envs::EnvSpec& spec)
{
    const auto cfg = parse_config(ckpt.config_text);
    std::vector<std::size_t> sizes{spec.obs_dim};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(2 * spec.act_dim);
    sac::GaussianPolicy policy;
    policy.action_dim = spec.act_dim;
    try {
        policy.net = numcore::get_mlp(ckpt.tensors, "policy", sizes);
    } catch (const numcore::ShapeError& e) {
        throw CheckpointError(std::string("checkpoint policy does not fit the environment: ") +
                              e.what());
    }
    return policy;
}

EvalSummary evaluate(const sac::GaussianPolicy& policy, envs::Environment& env,
                     std::size_t n_episodes, std::uint64_t seed)
{
    if (n_episodes == 0) {
        throw std::invalid_argument("evaluate: n_episodes must be positive");
    }
    numcore::Rng rng(stream_seed(seed, StreamId::eval));
    EvalSummary s;
    double go_sum = 0.0;
    double stop_sum = 0.0;
    std::size_t successes = 0;
    for (std::size_t e = 0; e < n_episodes; ++e) {
        auto start = env.reset(rng());
        Vector obs = start.obs;
        double total = 0.0;
        Cause cause = Cause::running;
        for (;;) {
            const auto res = env.step(sac::deterministic_action(policy, obs));
            total += res.reward_raw;
            if (res.done) {
                cause = res.cause;
                break;
            }
            obs = res.obs;
        }
        s.rewards.push_back(total);
        if (cause == Cause::landed || cause == Cause::finished) {
            ++successes;
        }
        for (std::size_t k = 0; k < kTalliedCauses.size(); ++k) {
            if (kTalliedCauses[k] == cause) {
                ++s.cause_counts[k];
            }
        }
        if (start.info.trial_kind == envs::TrialKind::go) {
            go_sum += total;
            ++s.go_episodes;
        } else {
            stop_sum += total;
            ++s.stop_episodes;
        }
    }
    const double n = static_cast<double>(n_episodes);
    s.episodes = n_episodes;
    for (double r : s.rewards) {
        s.mean += r;
    }
    s.mean /= n;
    for (double r : s.rewards) {
        s.std += (r - s.mean) * (r - s.mean);
    }
    s.std = std::sqrt(s.std / n);
    s.success_rate = static_cast<double>(successes) / n;
    s.mean_go = s.go_episodes ? go_sum / static_cast<double>(s.go_episodes) : 0.0;
    s.mean_stop = s.stop_episodes ? stop_sum / static_cast<double>(s.stop_episodes) : 0.0;
    return s;
}

EvalSummary evaluate(const Checkpoint& ckpt, envs::Environment& env, std::size_t n_episodes,
                     std::uint64_t seed)
{
    return evaluate(policy_from_checkpoint(ckpt, env.spec()), env, n_episodes, seed);
}

} // namespace saci::harness
