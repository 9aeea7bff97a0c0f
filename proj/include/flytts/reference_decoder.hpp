#pragma once

#include <array>
#include <span>
#include <string>

#include "flytts/config.hpp"
#include "flytts/spectral.hpp"
#include "flytts/tensor.hpp"
#include "flytts/weights.hpp"

namespace flytts {

// Transposed-convolution upsampling stack used as the benchmark counterpart:
// kernel-7 input convolution at 512 channels, four transposed-convolution
// levels (rates 8, 8, 2, 2 for x256 total), each followed by a multi-kernel
// residual block fan (kernels 3/7/11, dilations 1/3/5), then a kernel-7
// output convolution and tanh.
struct ReferenceDecoderShape {
    int initial_channels = 512;
    std::array<int, 4> upsample_rates{8, 8, 2, 2};
    std::array<int, 4> upsample_kernels{16, 16, 4, 4};
    std::array<int, 3> resblock_kernels{3, 7, 11};
    std::array<int, 3> resblock_dilations{1, 3, 5};

    int total_upsample() const { return 8 * 8 * 2 * 2; }
    int channels_at(int level) const { return initial_channels >> (level + 1); }
};

ReferenceDecoderShape reference_decoder_shape();

// Transposed 1-D convolution. x: [C_in x T], weight: [C_in x C_out x K].
// Output frames: (T - 1) * stride + K - 2 * padding.
FrameTensor conv_transpose1d(const FrameTensor& x, const FrameTensor& weight,
                             std::span<const float> bias, int stride, int padding);

// Output length is exactly T * 256 samples.
Waveform reference_decode(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config);

}  // namespace flytts
