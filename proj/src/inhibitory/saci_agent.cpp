#include "saci/inhibitory/saci_agent.hpp"

namespace saci::inhibitory {

sac::SacConfig SaciConfig::inhibitor_config() const
{
    auto cfg = base;
    cfg.target_entropy = inhibitor_target_entropy;
    return cfg;
}

SaciAgent make_saci_agent(std::size_t obs_dim, std::size_t action_dim, const SaciConfig& cfg,
                          std::uint64_t seed)
{
    auto sac_agent = sac::make_sac_agent(obs_dim, action_dim, cfg.base, seed);
    SaciAgent agent;
    agent.policy = std::move(sac_agent.policy);
    agent.policy_adam = std::move(sac_agent.policy_adam);
    agent.twin_r = std::move(sac_agent.twin);
    agent.temp_r = sac_agent.temp;
    agent.twin_i = sac::make_twin_q(obs_dim, action_dim, cfg.base.hidden,
                                    numcore::splitmix64(seed + 29));
    agent.temp_i.target_entropy = cfg.base.target_entropy;
    agent.dual_alpha = cfg.dual_alpha;
    return agent;
}

SaciNoise draw_saci_noise(const BranchBatches& batches, std::size_t action_dim,
                          numcore::Rng& rng)
{
    SaciNoise noise;
    if (batches.r) {
        noise.r = sac::draw_update_noise(batches.r->q_batch.size(), action_dim, rng);
    }
    if (batches.i) {
        noise.i = sac::draw_update_noise(batches.i->q_batch.size(), action_dim, rng);
    }
    return noise;
}

SaciMetrics saci_update_step(SaciAgent& agent, const BranchBatches& batches,
                             const SaciConfig& cfg, const SaciNoise& noise)
{
    if (batches.empty()) {
        throw std::invalid_argument("saci_update_step: no branch batch");
    }
    const auto& base = cfg.base;
    SaciMetrics m;
    std::optional<sac::PolicyEval> evals[2];
    Matrix states[2];

    for (Branch k : {Branch::R, Branch::I}) {
        const auto& bb = batches.get(k);
        if (!bb) {
            continue;
        }
        const auto& nz = k == Branch::R ? noise.r : noise.i;
        if (!nz) {
            throw std::invalid_argument("saci_update_step: missing noise for a present branch");
        }
        const auto slot = static_cast<std::size_t>(k);
        auto& twin = agent.twin(k);

        const auto q = q_loss_branch(twin, bb->q_batch, agent.policy, agent.alpha(k), base.gamma,
                                     nz->next);
        sac::apply_q_step(twin, q, base.lr);
        (k == Branch::R ? m.q_loss_r : m.q_loss_i) = q.loss;

        if (!bb->policy_rows.empty()) {
            states[slot] = bb->policy_states();
            evals[slot] = sac::evaluate_policy(agent.policy, states[slot],
                                               select_rows(nz->current, bb->policy_rows));
            if (agent.dual_alpha) {
                const auto a = dual_alpha_loss(agent.temp(k), evals[slot]->log_probs);
                sac::apply_alpha_step(agent.temp(k), a, base.lr);
                (k == Branch::R ? m.alpha_loss_r : m.alpha_loss_i) = a.loss;
            }
        }
        sac::soft_update_targets(twin, base.tau);
    }

    if (!agent.dual_alpha && (evals[0] || evals[1])) {
        Vector all(0);
        for (const auto& e : evals) {
            if (e) {
                Vector joined(all.size() + e->log_probs.size());
                joined << all, e->log_probs;
                all = std::move(joined);
            }
        }
        const auto a = sac::alpha_loss(agent.temp_r, all);
        sac::apply_alpha_step(agent.temp_r, a, base.lr);
        m.alpha_loss_r = a.loss;
        m.alpha_loss_i = a.loss;
    }

    std::optional<sac::PolicyTerm> total;
    for (Branch k : {Branch::R, Branch::I}) {
        const auto slot = static_cast<std::size_t>(k);
        if (!evals[slot]) {
            continue;
        }
        auto term = sac::policy_term(agent.policy, agent.twin(k), *evals[slot], states[slot],
                                     agent.alpha(k));
        if (total) {
            accumulate(*total, term);
        } else {
            total = std::move(term);
        }
    }
    if (total) {
        numcore::adam_step(agent.policy.net, total->grads, agent.policy_adam, base.lr);
        m.policy_loss = total->loss;
    }
    m.alpha_r = agent.alpha(Branch::R);
    m.alpha_i = agent.alpha(Branch::I);
    return m;
}

std::optional<SaciMetrics> saci_update_step(SaciAgent& agent, const ReplayPartition& partition,
                                            const SaciConfig& cfg, UpdateStreams streams,
                                            std::size_t episode)
{
    const auto indices = sample_indices(partition, cfg.base.batch_size, streams.sampler);
    if (indices.empty()) {
        return std::nullopt;
    }
    const auto batches = assemble_batches(partition, indices);
    const auto noise = draw_saci_noise(batches, agent.policy.action_dim, streams.noise);
    auto m = saci_update_step(agent, batches, cfg, noise);
    if (agent.inhibitor) {
        m.inhibitor = inhibitory_policy_update(*agent.inhibitor, partition, indices,
                                               cfg.inhibitor_config(), episode,
                                               streams.inhibitor);
    }
    return m;
}

numcore::NamedTensors export_tensors(const SaciAgent& agent)
{
    numcore::NamedTensors table;
    numcore::put_mlp(table, "policy", agent.policy.net);
    sac::put_twin(table, "twin_r.", agent.twin_r);
    sac::put_twin(table, "twin_i.", agent.twin_i);
    table.put("log_alpha_r", numcore::scalar_tensor(agent.temp_r.log_alpha));
    table.put("log_alpha_i", numcore::scalar_tensor(agent.temp_i.log_alpha));
    if (agent.inhibitor) {
        const auto inner = sac::export_tensors(agent.inhibitor->agent);
        for (const auto& [name, t] : inner.entries()) {
            table.put("pi_i." + name, t);
        }
    }
    return table;
}

namespace {

numcore::NamedTensors strip_prefix(const numcore::NamedTensors& table, const std::string& prefix)
{
    numcore::NamedTensors out;
    for (const auto& [name, t] : table.entries()) {
        if (name.rfind(prefix, 0) == 0) {
            out.put(name.substr(prefix.size()), t);
        }
    }
    return out;
}

void load_policy(SaciAgent& agent, const numcore::NamedTensors& table)
{
    agent.policy.net = numcore::get_mlp(table, "policy", agent.policy.net.layer_sizes);
    agent.policy_adam = numcore::adam_init(agent.policy.net);
}

void load_temp(sac::Temperature& temp, const numcore::NamedTensors& table,
               const std::string& name)
{
    temp.log_alpha = numcore::to_scalar(table.get(name));
    temp.adam = {};
}

} // namespace

void import_tensors(SaciAgent& agent, const numcore::NamedTensors& table)
{
    // validate everything before mutating the agent
    SaciAgent staged = agent;
    load_policy(staged, table);
    sac::get_twin(table, "twin_r.", staged.twin_r);
    sac::get_twin(table, "twin_i.", staged.twin_i);
    load_temp(staged.temp_r, table, "log_alpha_r");
    load_temp(staged.temp_i, table, "log_alpha_i");
    if (staged.inhibitor) {
        sac::import_tensors(staged.inhibitor->agent, strip_prefix(table, "pi_i."));
    } else if (table.has_prefix("pi_i.")) {
        throw numcore::ShapeError("checkpoint holds an inhibitory policy the agent lacks");
    }
    agent = std::move(staged);
}

void retrain_from(SaciAgent& agent, const numcore::NamedTensors& table, bool load_twin_i)
{
    const bool from_saci = table.contains("twin_r.q1.w0");
    SaciAgent staged = agent;
    load_policy(staged, table);
    sac::get_twin(table, from_saci ? "twin_r." : "", staged.twin_r);
    load_temp(staged.temp_r, table, from_saci ? "log_alpha_r" : "log_alpha");
    if (load_twin_i) {
        sac::get_twin(table, from_saci ? "twin_i." : "", staged.twin_i);
        load_temp(staged.temp_i, table, from_saci ? "log_alpha_i" : "log_alpha");
    } else {
        staged.twin_i.adam1 = numcore::adam_init(staged.twin_i.q1);
        staged.twin_i.adam2 = numcore::adam_init(staged.twin_i.q2);
    }
    if (staged.inhibitor && table.has_prefix("pi_i.")) {
        sac::import_tensors(staged.inhibitor->agent, strip_prefix(table, "pi_i."));
    }
    agent = std::move(staged);
}

} // namespace saci::inhibitory
