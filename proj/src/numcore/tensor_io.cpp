#include "saci/numcore/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace saci::numcore {

std::uint64_t Tensor::element_count() const
{
    std::uint64_t n = 1;
    for (auto d : dims) {
        n *= d;
    }
    return n;
}

Tensor to_tensor(const Matrix& m)
{
    Tensor t;
    t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
    t.data.assign(m.data(), m.data() + m.size());
    return t;
}

Tensor to_tensor(const Vector& v)
{
    Tensor t;
    t.dims = {static_cast<std::uint64_t>(v.size())};
    t.data.assign(v.data(), v.data() + v.size());
    return t;
}

Tensor scalar_tensor(double value)
{
    return Tensor{{}, {value}};
}

Matrix to_matrix(const Tensor& t)
{
    require_shape(t.rank() == 2, "tensor is not rank 2");
    Matrix m(static_cast<Eigen::Index>(t.dims[0]), static_cast<Eigen::Index>(t.dims[1]));
    std::memcpy(m.data(), t.data.data(), t.data.size() * sizeof(double));
    return m;
}

Vector to_vector(const Tensor& t)
{
    require_shape(t.rank() == 1, "tensor is not rank 1");
    Vector v(static_cast<Eigen::Index>(t.dims[0]));
    std::memcpy(v.data(), t.data.data(), t.data.size() * sizeof(double));
    return v;
}

double to_scalar(const Tensor& t)
{
    require_shape(t.rank() == 0 && t.data.size() == 1, "tensor is not a scalar");
    return t.data[0];
}

void write_u64(std::ostream& out, std::uint64_t value)
{
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
    }
    out.write(bytes.data(), bytes.size());
}

std::uint64_t read_u64(std::istream& in)
{
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) {
        throw ShapeError("unexpected end of tensor stream");
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return value;
}

void write_f64(std::ostream& out, double value)
{
    write_u64(out, std::bit_cast<std::uint64_t>(value));
}

double read_f64(std::istream& in)
{
    return std::bit_cast<double>(read_u64(in));
}

void write_tensor(std::ostream& out, const Tensor& t)
{
    require_shape(t.element_count() == t.data.size(), "tensor dims do not match data length");
    write_u64(out, t.rank());
    for (auto d : t.dims) {
        write_u64(out, d);
    }
    for (double x : t.data) {
        write_f64(out, x);
    }
}

Tensor read_tensor(std::istream& in)
{
    constexpr std::uint64_t max_rank = 8;
    constexpr std::uint64_t max_elements = std::uint64_t{1} << 32;
    Tensor t;
    const auto rank = read_u64(in);
    require_shape(rank <= max_rank, "tensor rank " + std::to_string(rank) + " out of range");
    t.dims.resize(rank);
    for (auto& d : t.dims) {
        d = read_u64(in);
    }
    const auto n = t.element_count();
    require_shape(n <= max_elements, "tensor too large");
    // grow while reading so a truncated header cannot force a huge allocation
    t.data.reserve(std::min<std::uint64_t>(n, std::uint64_t{1} << 20));
    for (std::uint64_t i = 0; i < n; ++i) {
        t.data.push_back(read_f64(in));
    }
    return t;
}

} // namespace saci::numcore
