#pragma once

#include "saci/numcore/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace saci::numcore {

/// Dense tensor payload as stored in checkpoints: rank, dims, row-major binary64 values.
struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;

    std::uint64_t rank() const { return dims.size(); }
    std::uint64_t element_count() const;

    bool operator==(const Tensor&) const = default;
};

Tensor to_tensor(const Matrix& m);
Tensor to_tensor(const Vector& v);
Tensor scalar_tensor(double value);

Matrix to_matrix(const Tensor& t);
Vector to_vector(const Tensor& t);
double to_scalar(const Tensor& t);

void write_u64(std::ostream& out, std::uint64_t value);
std::uint64_t read_u64(std::istream& in);
void write_f64(std::ostream& out, double value);
double read_f64(std::istream& in);

/// Little-endian encoding regardless of host byte order.
void write_tensor(std::ostream& out, const Tensor& t);
Tensor read_tensor(std::istream& in);

} // namespace saci::numcore
