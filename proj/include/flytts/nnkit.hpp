#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flytts/tensor.hpp"

namespace flytts {

inline constexpr float kLayerNormEps = 1e-6f;
inline constexpr float kLeakyReluSlope = 0.1f;

// 1-D cross-correlation. x: [C_in x T], weight: [C_out x C_in x K],
// bias: [C_out] or empty. Output frames: T + 2*padding - dilation*(K-1).
// Accumulates in double, stores float.
FrameTensor conv1d(const FrameTensor& x, const FrameTensor& weight,
                   std::span<const float> bias, int padding, int dilation = 1);

// Per-channel convolution. x: [C x T], weight: [C x K], bias: [C] or empty.
FrameTensor depthwise_conv1d(const FrameTensor& x, const FrameTensor& weight,
                             std::span<const float> bias, int padding);

// Per-frame linear map. x: [In x T], weight: [Out x In], bias: [Out] or empty.
FrameTensor linear_frames(const FrameTensor& x, const FrameTensor& weight,
                          std::span<const float> bias);

// Normalize one feature vector: (x - mean) / sqrt(var + eps) * gamma + beta,
// population variance over the C entries.
std::vector<float> layer_norm(std::span<const float> x, std::span<const float> gamma,
                              std::span<const float> beta, float eps = kLayerNormEps);

// layer_norm applied independently to every frame (column) of [C x T].
FrameTensor layer_norm_frames(const FrameTensor& x, std::span<const float> gamma,
                              std::span<const float> beta, float eps = kLayerNormEps);

// Exact GELU, x * Phi(x) with the erf-based normal CDF.
float gelu(float x);
void gelu_inplace(FrameTensor& t);

float leaky_relu(float x, float slope = kLeakyReluSlope);
void leaky_relu_inplace(FrameTensor& t, float slope = kLeakyReluSlope);

struct AttentionWeights {
    const FrameTensor* wq = nullptr;  // [D x D]
    const FrameTensor* wk = nullptr;
    const FrameTensor* wv = nullptr;
    const FrameTensor* wo = nullptr;
    const FrameTensor* bq = nullptr;  // [D]
    const FrameTensor* bk = nullptr;
    const FrameTensor* bv = nullptr;
    const FrameTensor* bo = nullptr;
};

// Scaled dot-product attention over frames. x: [D x T], D divisible by heads.
// mask, when given, is row-major [T x T] with nonzero meaning "query row may
// attend to key column"; a fully masked query row is rejected.
FrameTensor multi_head_attention(const FrameTensor& x, const AttentionWeights& w,
                                 int heads, const std::vector<std::uint8_t>* mask = nullptr);

}  // namespace flytts
