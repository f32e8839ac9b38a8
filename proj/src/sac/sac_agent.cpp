#include "saci/sac/sac_agent.hpp"

namespace saci::sac {

SacAgent make_sac_agent(std::size_t obs_dim, std::size_t action_dim, const SacConfig& cfg,
                        std::uint64_t seed)
{
    SacAgent agent;
    agent.policy = make_policy(obs_dim, action_dim, cfg.hidden, numcore::splitmix64(seed));
    agent.policy_adam = numcore::adam_init(agent.policy.net);
    agent.twin = make_twin_q(obs_dim, action_dim, cfg.hidden, numcore::splitmix64(seed + 17));
    agent.temp.target_entropy = cfg.target_entropy;
    return agent;
}

PolicyTerm policy_loss(const GaussianPolicy& policy, const TwinQ& twin, const Matrix& states,
                       double alpha, const Matrix& noise)
{
    if (states.rows() == 0) {
        throw std::invalid_argument("policy_loss: empty state batch");
    }
    const auto eval = evaluate_policy(policy, states, noise);
    return policy_term(policy, twin, eval, states, alpha);
}

UpdateNoise draw_update_noise(Eigen::Index batch, std::size_t action_dim, numcore::Rng& rng)
{
    const auto d = static_cast<Eigen::Index>(action_dim);
    UpdateNoise noise;
    noise.next = numcore::standard_normal(batch, d, rng);
    noise.current = numcore::standard_normal(batch, d, rng);
    return noise;
}

SacMetrics sac_update_step(SacAgent& agent, const SacBatch& batch, const SacConfig& cfg,
                           const UpdateNoise& noise)
{
    SacMetrics m;
    const auto q = q_loss(agent.twin, batch, agent.policy, agent.temp.alpha(), cfg.gamma,
                          noise.next);
    apply_q_step(agent.twin, q, cfg.lr);
    m.q_loss = q.loss;

    // The policy is unchanged until the actor step, so one evaluation serves both the
    // temperature and the actor losses.
    const auto eval = evaluate_policy(agent.policy, batch.states, noise.current);
    const auto a_loss = alpha_loss(agent.temp, eval.log_probs);
    apply_alpha_step(agent.temp, a_loss, cfg.lr);
    m.alpha_loss = a_loss.loss;
    m.mean_log_prob = eval.log_probs.mean();

    soft_update_targets(agent.twin, cfg.tau);

    const auto term = policy_term(agent.policy, agent.twin, eval, batch.states, agent.temp.alpha());
    numcore::adam_step(agent.policy.net, term.grads, agent.policy_adam, cfg.lr);
    m.policy_loss = term.loss;
    m.alpha = agent.temp.alpha();
    return m;
}

std::optional<SacMetrics> sac_update_step(SacAgent& agent, const RingBuffer<Experience>& replay,
                                          const SacConfig& cfg, numcore::Rng& sampler_rng,
                                          numcore::Rng& noise_rng)
{
    if (replay.size() < cfg.batch_size) {
        return std::nullopt;
    }
    const auto batch = gather_batch(replay, replay.sample_indices(cfg.batch_size, sampler_rng));
    const auto noise = draw_update_noise(batch.size(), agent.policy.action_dim, noise_rng);
    return sac_update_step(agent, batch, cfg, noise);
}

void put_twin(numcore::NamedTensors& table, const std::string& prefix, const TwinQ& twin)
{
    numcore::put_mlp(table, prefix + "q1", twin.q1);
    numcore::put_mlp(table, prefix + "q2", twin.q2);
    numcore::put_mlp(table, prefix + "q1_target", twin.q1_target);
    numcore::put_mlp(table, prefix + "q2_target", twin.q2_target);
}

void get_twin(const numcore::NamedTensors& table, const std::string& prefix, TwinQ& twin)
{
    const auto sizes = twin.q1.layer_sizes;
    TwinQ loaded;
    loaded.q1 = numcore::get_mlp(table, prefix + "q1", sizes);
    loaded.q2 = numcore::get_mlp(table, prefix + "q2", sizes);
    loaded.q1_target = numcore::get_mlp(table, prefix + "q1_target", sizes);
    loaded.q2_target = numcore::get_mlp(table, prefix + "q2_target", sizes);
    loaded.adam1 = numcore::adam_init(loaded.q1);
    loaded.adam2 = numcore::adam_init(loaded.q2);
    twin = std::move(loaded);
}

numcore::NamedTensors export_tensors(const SacAgent& agent)
{
    numcore::NamedTensors table;
    numcore::put_mlp(table, "policy", agent.policy.net);
    put_twin(table, "", agent.twin);
    table.put("log_alpha", numcore::scalar_tensor(agent.temp.log_alpha));
    return table;
}

void import_tensors(SacAgent& agent, const numcore::NamedTensors& table)
{
    auto net = numcore::get_mlp(table, "policy", agent.policy.net.layer_sizes);
    const double log_alpha = numcore::to_scalar(table.get("log_alpha"));
    get_twin(table, "", agent.twin);
    agent.policy.net = std::move(net);
    agent.policy_adam = numcore::adam_init(agent.policy.net);
    agent.temp.log_alpha = log_alpha;
    agent.temp.adam = {};
}

} // namespace saci::sac
