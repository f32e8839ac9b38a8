#include "saci/sac/replay.hpp"

namespace saci::sac {

SacBatch gather_batch(const RingBuffer<Experience>& buffer, const std::vector<std::size_t>& indices)
{
    return gather_batch(
        buffer, indices, [](const Experience& e) -> const Vector& { return e.state; },
        [](const Experience& e) -> const Vector& { return e.action; },
        [](const Experience& e) { return e.reward; },
        [](const Experience& e) -> const Vector& { return e.next_state; },
        [](const Experience& e) { return e.done; });
}

SacBatch concat(const SacBatch& a, const SacBatch& b)
{
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    numcore::require_shape(a.states.cols() == b.states.cols() &&
                               a.actions.cols() == b.actions.cols(),
                           "cannot concatenate batches of different widths");
    auto stack = [](const Matrix& x, const Matrix& y) {
        Matrix out(x.rows() + y.rows(), x.cols());
        out << x, y;
        return out;
    };
    auto stack_vec = [](const Vector& x, const Vector& y) {
        Vector out(x.size() + y.size());
        out << x, y;
        return out;
    };
    return SacBatch{stack(a.states, b.states), stack(a.actions, b.actions),
                    stack_vec(a.rewards, b.rewards), stack(a.next_states, b.next_states),
                    stack_vec(a.dones, b.dones)};
}

} // namespace saci::sac
