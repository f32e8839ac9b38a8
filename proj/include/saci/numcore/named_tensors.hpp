#pragma once

#include "saci/numcore/mlp.hpp"
#include "saci/numcore/tensor_io.hpp"

#include <string>
#include <utility>
#include <vector>

namespace saci::numcore {

/// Ordered name -> tensor table. Order is preserved so serialization is reproducible.
class NamedTensors {
public:
    void put(std::string name, Tensor t);
    const Tensor& get(const std::string& name) const;
    const Tensor* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }
    bool has_prefix(const std::string& prefix) const;

    const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    bool operator==(const NamedTensors&) const = default;

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
};

/// Stores `prefix.w<i>` and `prefix.b<i>` for each layer.
void put_mlp(NamedTensors& table, const std::string& prefix, const MlpParams& params);

/// Reads a network written by put_mlp; throws ShapeError when `expected_sizes` disagrees.
MlpParams get_mlp(const NamedTensors& table, const std::string& prefix,
                  const std::vector<std::size_t>& expected_sizes);

} // namespace saci::numcore
