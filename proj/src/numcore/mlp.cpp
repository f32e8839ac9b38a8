#include "saci/numcore/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

namespace saci::numcore {

std::size_t MlpParams::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
    }
    return n;
}

MlpParams mlp_init(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed)
{
    if (layer_sizes.size() < 2) {
        throw ConfigError("mlp needs at least an input and an output layer");
    }
    for (auto size : layer_sizes) {
        if (size == 0) {
            throw ConfigError("mlp layer sizes must be positive");
        }
    }

    std::mt19937_64 rng(seed);
    MlpParams params;
    params.layer_sizes = layer_sizes;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        const auto fan_in = layer_sizes[i];
        const auto fan_out = layer_sizes[i + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);

        Matrix w(fan_out, fan_in);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = dist(rng);
            }
        }
        params.weights.push_back(std::move(w));
        params.biases.push_back(Vector::Zero(static_cast<Eigen::Index>(fan_out)));
    }
    return params;
}

MlpParams zeros_like(const MlpParams& params)
{
    MlpParams z;
    z.layer_sizes = params.layer_sizes;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        z.weights.push_back(Matrix::Zero(params.weights[i].rows(), params.weights[i].cols()));
        z.biases.push_back(Vector::Zero(params.biases[i].size()));
    }
    return z;
}

bool same_shape(const MlpParams& a, const MlpParams& b)
{
    if (a.layer_sizes != b.layer_sizes || a.weights.size() != b.weights.size() ||
        a.biases.size() != b.biases.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        if (a.weights[i].rows() != b.weights[i].rows() ||
            a.weights[i].cols() != b.weights[i].cols() ||
            a.biases[i].size() != b.biases[i].size()) {
            return false;
        }
    }
    return true;
}

namespace {

void check_input(const MlpParams& params, const Matrix& input)
{
    require_shape(params.num_layers() > 0, "mlp has no layers");
    require_shape(static_cast<std::size_t>(input.cols()) == params.input_size(),
                  "mlp input has " + std::to_string(input.cols()) + " columns, expected " +
                      std::to_string(params.input_size()));
}

} // namespace

ForwardResult mlp_forward(const MlpParams& params, const Matrix& input)
{
    check_input(params, input);
    ForwardResult result;
    auto& cache = result.cache;
    const auto layers = params.num_layers();
    cache.pre.reserve(layers);
    cache.post.reserve(layers + 1);
    cache.post.push_back(input);

    for (std::size_t i = 0; i < layers; ++i) {
        Matrix z = cache.post.back() * params.weights[i].transpose();
        z.rowwise() += params.biases[i].transpose();
        cache.pre.push_back(z);
        if (i + 1 < layers) {
            cache.post.push_back(z.cwiseMax(0.0));
        } else {
            cache.post.push_back(std::move(z));
        }
    }
    result.output = cache.post.back();
    return result;
}

Matrix mlp_predict(const MlpParams& params, const Matrix& input)
{
    check_input(params, input);
    Matrix h = input;
    const auto layers = params.num_layers();
    for (std::size_t i = 0; i < layers; ++i) {
        Matrix z = h * params.weights[i].transpose();
        z.rowwise() += params.biases[i].transpose();
        if (i + 1 < layers) {
            h = z.cwiseMax(0.0);
        } else {
            h = std::move(z);
        }
    }
    return h;
}

namespace {

void check_cache(const MlpParams& params, const ForwardCache& cache, const Matrix& grad_output)
{
    const auto layers = params.num_layers();
    require_shape(cache.pre.size() == layers && cache.post.size() == layers + 1,
                  "forward cache does not match network depth");
    for (std::size_t i = 0; i < layers; ++i) {
        require_shape(static_cast<std::size_t>(cache.post[i].cols()) == params.layer_sizes[i] &&
                          static_cast<std::size_t>(cache.pre[i].cols()) == params.layer_sizes[i + 1],
                      "forward cache does not match layer sizes");
    }
    require_shape(grad_output.rows() == cache.post.back().rows() &&
                      grad_output.cols() == cache.post.back().cols(),
                  "grad_output shape does not match network output");
}

// ReLU subgradient at exactly zero is taken as zero.
void relu_mask(Matrix& delta, const Matrix& pre)
{
    delta.array() *= (pre.array() > 0.0).cast<double>();
}

} // namespace

BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Matrix& grad_output)
{
    check_cache(params, cache, grad_output);
    BackwardResult result;
    result.param_grads.layer_sizes = params.layer_sizes;
    const auto layers = params.num_layers();
    result.param_grads.weights.resize(layers);
    result.param_grads.biases.resize(layers);

    Matrix delta = grad_output;
    for (std::size_t k = layers; k-- > 0;) {
        result.param_grads.weights[k].noalias() = delta.transpose() * cache.post[k];
        result.param_grads.biases[k] = delta.colwise().sum().transpose();
        Matrix upstream = delta * params.weights[k];
        if (k > 0) {
            relu_mask(upstream, cache.pre[k - 1]);
        }
        delta = std::move(upstream);
    }
    result.grad_input = std::move(delta);
    return result;
}

Matrix mlp_input_gradient(const MlpParams& params, const ForwardCache& cache,
                          const Matrix& grad_output)
{
    check_cache(params, cache, grad_output);
    Matrix delta = grad_output;
    for (std::size_t k = params.num_layers(); k-- > 0;) {
        Matrix upstream = delta * params.weights[k];
        if (k > 0) {
            relu_mask(upstream, cache.pre[k - 1]);
        }
        delta = std::move(upstream);
    }
    return delta;
}

void polyak_update(MlpParams& target, const MlpParams& online, double tau)
{
    require_shape(same_shape(target, online), "polyak_update: target and online shapes differ");
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw ConfigError("polyak_update: tau must lie in [0, 1]");
    }
    for (std::size_t i = 0; i < target.weights.size(); ++i) {
        target.weights[i] = (1.0 - tau) * target.weights[i] + tau * online.weights[i];
        target.biases[i] = (1.0 - tau) * target.biases[i] + tau * online.biases[i];
    }
}

void add_scaled(MlpParams& accum, const MlpParams& other, double factor)
{
    require_shape(same_shape(accum, other), "add_scaled: shapes differ");
    for (std::size_t i = 0; i < accum.weights.size(); ++i) {
        accum.weights[i] += factor * other.weights[i];
        accum.biases[i] += factor * other.biases[i];
    }
}

void scale(MlpParams& params, double factor)
{
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        params.weights[i] *= factor;
        params.biases[i] *= factor;
    }
}

bool all_finite(const MlpParams& params)
{
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        if (!params.weights[i].allFinite() || !params.biases[i].allFinite()) {
            return false;
        }
    }
    return true;
}

} // namespace saci::numcore
