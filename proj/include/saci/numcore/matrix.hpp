#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace saci::numcore {

// Row-major so a batch is one sample per row and tensors serialize in order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_shape(bool ok, const std::string& what)
{
    if (!ok) {
        throw ShapeError(what);
    }
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.allFinite();
}

} // namespace saci::numcore
