#include "saci/numcore/named_tensors.hpp"

namespace saci::numcore {

void NamedTensors::put(std::string name, Tensor t)
{
    for (auto& [existing, tensor] : entries_) {
        if (existing == name) {
            tensor = std::move(t);
            return;
        }
    }
    entries_.emplace_back(std::move(name), std::move(t));
}

const Tensor* NamedTensors::find(const std::string& name) const
{
    for (const auto& [existing, tensor] : entries_) {
        if (existing == name) {
            return &tensor;
        }
    }
    return nullptr;
}

const Tensor& NamedTensors::get(const std::string& name) const
{
    const auto* t = find(name);
    if (t == nullptr) {
        throw ShapeError("missing tensor '" + name + "'");
    }
    return *t;
}

bool NamedTensors::has_prefix(const std::string& prefix) const
{
    for (const auto& entry : entries_) {
        if (entry.first.rfind(prefix, 0) == 0) {
            return true;
        }
    }
    return false;
}

void put_mlp(NamedTensors& table, const std::string& prefix, const MlpParams& params)
{
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        table.put(prefix + ".w" + std::to_string(i), to_tensor(params.weights[i]));
        table.put(prefix + ".b" + std::to_string(i), to_tensor(params.biases[i]));
    }
}

MlpParams get_mlp(const NamedTensors& table, const std::string& prefix,
                  const std::vector<std::size_t>& expected_sizes)
{
    MlpParams params;
    params.layer_sizes = expected_sizes;
    for (std::size_t i = 0; i + 1 < expected_sizes.size(); ++i) {
        auto w = to_matrix(table.get(prefix + ".w" + std::to_string(i)));
        auto b = to_vector(table.get(prefix + ".b" + std::to_string(i)));
        require_shape(static_cast<std::size_t>(w.rows()) == expected_sizes[i + 1] &&
                          static_cast<std::size_t>(w.cols()) == expected_sizes[i] &&
                          static_cast<std::size_t>(b.size()) == expected_sizes[i + 1],
                      "tensor '" + prefix + "' layer " + std::to_string(i) +
                          " has incompatible shape");
        params.weights.push_back(std::move(w));
        params.biases.push_back(std::move(b));
    }
    if (table.contains(prefix + ".w" + std::to_string(expected_sizes.size() - 1))) {
        throw ShapeError("tensor '" + prefix + "' has more layers than expected");
    }
    return params;
}

} // namespace saci::numcore
