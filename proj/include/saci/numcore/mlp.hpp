#pragma once

#include "saci/numcore/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace saci::numcore {

/// Fully connected network: ReLU on every hidden layer, identity on the output.
///
/// weights[i] maps layer i to layer i+1 and has shape (layer_sizes[i+1], layer_sizes[i]).
/// The same type doubles as the container for parameter gradients.
struct MlpParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t num_layers() const { return weights.size(); }
    std::size_t parameter_count() const;
};

using MlpGrads = MlpParams;

/// Activations recorded by mlp_forward. post[0] is the input batch, post[i+1] the
/// output of layer i (after ReLU for hidden layers); pre[i] is layer i before activation.
struct ForwardCache {
    std::vector<Matrix> pre;
    std::vector<Matrix> post;
};

struct ForwardResult {
    Matrix output;
    ForwardCache cache;
};

struct BackwardResult {
    MlpGrads param_grads;
    Matrix grad_input;
};

/// Uniform fan-in initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
MlpParams mlp_init(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

MlpParams zeros_like(const MlpParams& params);

bool same_shape(const MlpParams& a, const MlpParams& b);

ForwardResult mlp_forward(const MlpParams& params, const Matrix& input);

/// Output only, no cache kept. Same arithmetic as mlp_forward.
Matrix mlp_predict(const MlpParams& params, const Matrix& input);

/// Reverse-mode pass for L = sum(output .* grad_output) over the batch.
BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Matrix& grad_output);

/// dL/dinput only; skips the parameter gradients.
Matrix mlp_input_gradient(const MlpParams& params, const ForwardCache& cache,
                          const Matrix& grad_output);

/// target <- (1 - tau) * target + tau * online
void polyak_update(MlpParams& target, const MlpParams& online, double tau);

void add_scaled(MlpParams& accum, const MlpParams& other, double scale);
void scale(MlpParams& params, double factor);
bool all_finite(const MlpParams& params);

} // namespace saci::numcore
