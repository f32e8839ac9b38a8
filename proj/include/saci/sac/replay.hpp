#pragma once

#include "saci/numcore/matrix.hpp"
#include "saci/numcore/random.hpp"

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace saci::sac {

using numcore::Matrix;
using numcore::Vector;

/// Fixed-capacity FIFO store. Storage grows lazily up to capacity, then the oldest
/// entry is overwritten.
template <typename T>
class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity) : capacity_(capacity)
    {
        if (capacity_ == 0) {
            throw numcore::ConfigError("replay capacity must be positive");
        }
    }

    void push(T item)
    {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(item));
        } else {
            items_[cursor_] = std::move(item);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

    /// Oldest-first indexing.
    const T& at_age(std::size_t i) const
    {
        if (items_.size() < capacity_) {
            return items_.at(i);
        }
        return items_.at((cursor_ + i) % capacity_);
    }

    const T& operator[](std::size_t slot) const { return items_[slot]; }
    const std::vector<T>& slots() const { return items_; }

    /// Uniform draws with replacement over stored slots.
    std::vector<std::size_t> sample_indices(std::size_t count, numcore::Rng& rng) const
    {
        if (items_.empty()) {
            throw std::logic_error("sample from empty buffer");
        }
        std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
        std::vector<std::size_t> out(count);
        for (auto& idx : out) {
            idx = pick(rng);
        }
        return out;
    }

    void clear()
    {
        items_.clear();
        cursor_ = 0;
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<T> items_;
};

struct Experience {
    Vector state;
    Vector action;
    double reward = 0.0;
    Vector next_state;
    bool done = false;
};

struct SacBatch {
    Matrix states;
    Matrix actions;
    Vector rewards;
    Matrix next_states;
    Vector dones;

    Eigen::Index size() const { return states.rows(); }
    bool empty() const { return states.rows() == 0; }
};

/// Assemble a batch from stored items. Accessors pull state/action/reward/next/done.
template <typename T, typename StateFn, typename ActionFn, typename RewardFn, typename NextFn,
          typename DoneFn>
SacBatch gather_batch(const RingBuffer<T>& buffer, const std::vector<std::size_t>& indices,
                      StateFn state_of, ActionFn action_of, RewardFn reward_of, NextFn next_of,
                      DoneFn done_of)
{
    SacBatch batch;
    if (indices.empty()) {
        return batch;
    }
    const auto n = static_cast<Eigen::Index>(indices.size());
    const auto& first = buffer[indices.front()];
    batch.states.resize(n, state_of(first).size());
    batch.actions.resize(n, action_of(first).size());
    batch.rewards.resize(n);
    batch.next_states.resize(n, next_of(first).size());
    batch.dones.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& item = buffer[indices[static_cast<std::size_t>(r)]];
        batch.states.row(r) = state_of(item).transpose();
        batch.actions.row(r) = action_of(item).transpose();
        batch.rewards(r) = reward_of(item);
        batch.next_states.row(r) = next_of(item).transpose();
        batch.dones(r) = done_of(item) ? 1.0 : 0.0;
    }
    return batch;
}

SacBatch gather_batch(const RingBuffer<Experience>& buffer,
                      const std::vector<std::size_t>& indices);

/// Row-wise concatenation; either side may be empty.
SacBatch concat(const SacBatch& a, const SacBatch& b);

} // namespace saci::sac
