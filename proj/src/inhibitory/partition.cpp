#include "saci/inhibitory/partition.hpp"

namespace saci::inhibitory {

std::string_view to_string(Branch b)
{
    return b == Branch::R ? "R" : "I";
}

ReplayPartition::ReplayPartition(std::size_t capacity, bool partitioned)
    : partitioned_(partitioned), d_r_(capacity), d_i_(capacity)
{
}

void ReplayPartition::push(Transition t)
{
    if (partitioned_ && t.branch == Branch::I) {
        d_i_.push(std::move(t));
    } else {
        d_r_.push(std::move(t));
    }
}

SampledIndices sample_indices(const ReplayPartition& partition, std::size_t batch_size,
                              numcore::Rng& rng)
{
    if (batch_size == 0) {
        throw numcore::ConfigError("batch size must be positive");
    }
    SampledIndices out;
    if (partition.d_r().size() >= batch_size) {
        out.r = partition.d_r().sample_indices(batch_size, rng);
    }
    if (partition.partitioned() && partition.d_i().size() >= batch_size) {
        out.i = partition.d_i().sample_indices(batch_size, rng);
    }
    return out;
}

Matrix BranchBatch::policy_states() const
{
    return select_rows(q_batch.states, policy_rows);
}

namespace {

SacBatch gather(const sac::RingBuffer<Transition>& buffer, const std::vector<std::size_t>& idx,
                std::optional<Branch> credited)
{
    return sac::gather_batch(
        buffer, idx, [](const Transition& t) -> const Vector& { return t.state; },
        [](const Transition& t) -> const Vector& { return t.action; },
        [credited](const Transition& t) {
            return !credited || t.branch == *credited ? t.reward : 0.0;
        },
        [](const Transition& t) -> const Vector& { return t.next_state; },
        [](const Transition& t) { return t.done; });
}

std::vector<Eigen::Index> all_rows(std::size_t n)
{
    std::vector<Eigen::Index> rows(n);
    for (std::size_t k = 0; k < n; ++k) {
        rows[k] = static_cast<Eigen::Index>(k);
    }
    return rows;
}

} // namespace

BranchBatches assemble_batches(const ReplayPartition& partition, const SampledIndices& indices)
{
    BranchBatches out;
    if (partition.partitioned()) {
        if (indices.r) {
            out.r = BranchBatch{gather(partition.d_r(), *indices.r, std::nullopt),
                                all_rows(indices.r->size())};
        }
        if (indices.i) {
            out.i = BranchBatch{gather(partition.d_i(), *indices.i, std::nullopt),
                                all_rows(indices.i->size())};
        }
        return out;
    }
    if (!indices.r) {
        return out;
    }
    const auto& shared = partition.d_r();
    const auto& idx = *indices.r;
    std::vector<Eigen::Index> rows_r;
    std::vector<Eigen::Index> rows_i;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        auto& rows = shared[idx[k]].branch == Branch::R ? rows_r : rows_i;
        rows.push_back(static_cast<Eigen::Index>(k));
    }
    out.r = BranchBatch{gather(shared, idx, Branch::R), std::move(rows_r)};
    out.i = BranchBatch{gather(shared, idx, Branch::I), std::move(rows_i)};
    return out;
}

BranchBatches sample_batches(const ReplayPartition& partition, std::size_t batch_size,
                             numcore::Rng& rng)
{
    return assemble_batches(partition, sample_indices(partition, batch_size, rng));
}

SacBatch inhibitor_batch(const ReplayPartition& partition, const SampledIndices& indices)
{
    auto gather_raw = [](const sac::RingBuffer<Transition>& buffer,
                         const std::vector<std::size_t>& idx) {
        return sac::gather_batch(
            buffer, idx, [](const Transition& t) -> const Vector& { return t.state; },
            [](const Transition& t) { return Vector::Constant(1, t.inhibitor_action).eval(); },
            [](const Transition& t) { return t.reward_raw; },
            [](const Transition& t) -> const Vector& { return t.next_state; },
            [](const Transition& t) { return t.done; });
    };
    SacBatch out;
    if (indices.r) {
        out = gather_raw(partition.d_r(), *indices.r);
    }
    if (indices.i) {
        out = sac::concat(out, gather_raw(partition.d_i(), *indices.i));
    }
    return out;
}

Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& rows)
{
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
    }
    return out;
}

Vector select_rows(const Vector& v, const std::vector<Eigen::Index>& rows)
{
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = v(rows[k]);
    }
    return out;
}

} // namespace saci::inhibitory
