#pragma once

#include "saci/sac/replay.hpp"

#include <optional>
#include <string_view>

namespace saci::inhibitory {

using numcore::Matrix;
using numcore::Vector;
using sac::SacBatch;

enum class Branch { R, I };

std::string_view to_string(Branch b);

struct Transition {
    Vector state;
    Vector action;
    Branch branch = Branch::R;
    double reward = 0.0;      // branch reward (r_R or r_I)
    double reward_raw = 0.0;  // environment reward, used by the inhibitory policy
    Vector next_state;
    bool done = false;
    double inhibitor_action = 0.0;  // squashed output of the inhibitory policy at `state`
};

/// D_R and D_I. With `partitioned == false` every transition goes to a single shared
/// buffer (reported as d_r) and the branch label is kept on the row.
class ReplayPartition {
public:
    explicit ReplayPartition(std::size_t capacity, bool partitioned = true);

    void push(Transition t);

    bool partitioned() const { return partitioned_; }
    const sac::RingBuffer<Transition>& d_r() const { return d_r_; }
    const sac::RingBuffer<Transition>& d_i() const { return d_i_; }
    const sac::RingBuffer<Transition>& buffer(Branch b) const
    {
        return b == Branch::R ? d_r_ : d_i_;
    }
    std::size_t fill(Branch b) const { return buffer(b).size(); }
    std::size_t total() const { return d_r_.size() + d_i_.size(); }

private:
    bool partitioned_;
    sac::RingBuffer<Transition> d_r_;
    sac::RingBuffer<Transition> d_i_;
};

/// Indices drawn for one update. A branch whose buffer holds fewer than the batch size is
/// absent. In shared mode only `r` is populated and indexes the shared buffer.
struct SampledIndices {
    std::optional<std::vector<std::size_t>> r;
    std::optional<std::vector<std::size_t>> i;

    bool empty() const { return !r && !i; }
};

/// R indices are drawn before I indices.
SampledIndices sample_indices(const ReplayPartition& partition, std::size_t batch_size,
                              numcore::Rng& rng);

/// Training data for one branch: the critic batch and the rows of it whose states feed the
/// branch's actor and temperature terms.
struct BranchBatch {
    SacBatch q_batch;
    std::vector<Eigen::Index> policy_rows;

    Matrix policy_states() const;
};

struct BranchBatches {
    std::optional<BranchBatch> r;
    std::optional<BranchBatch> i;

    bool empty() const { return !r && !i; }
    const std::optional<BranchBatch>& get(Branch b) const { return b == Branch::R ? r : i; }
};

/// Partitioned mode: each branch batch comes from its own buffer and all rows feed its actor
/// term. Shared mode: both critics see every sampled row, with reward equal to the stored
/// branch reward where the label matches and 0 elsewhere; actor rows are split by label.
BranchBatches assemble_batches(const ReplayPartition& partition, const SampledIndices& indices);

/// Convenience: sample_indices then assemble_batches.
BranchBatches sample_batches(const ReplayPartition& partition, std::size_t batch_size,
                             numcore::Rng& rng);

/// Rows for the inhibitory policy's own update: its stored action and the raw reward, over
/// the same sampled transitions.
SacBatch inhibitor_batch(const ReplayPartition& partition, const SampledIndices& indices);

Matrix select_rows(const Matrix& m, const std::vector<Eigen::Index>& rows);
Vector select_rows(const Vector& v, const std::vector<Eigen::Index>& rows);

} // namespace saci::inhibitory
