#pragma once

#include <string>
#include <string_view>

#include "flytts/config.hpp"
#include "flytts/spectral.hpp"
#include "flytts/tensor.hpp"
#include "flytts/weights.hpp"

namespace flytts {

// Log-magnitude clip; keeps exp bounded for arbitrary head outputs.
inline constexpr float kLogMagnitudeClip = 4.605170185988091f;  // log(1e2)

std::string decoder_block_slot(int block, std::string_view param);

// Kernel-7 input convolution plus layer norm; frame count preserved,
// channel count becomes decoder_dim.
FrameTensor embed_frames(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config);

// Residual ConvNeXt block: 7x7 depthwise convolution, layer norm, and a
// pointwise expand-GELU-contract bottleneck, scaled per channel before the
// residual add. Shape preserved.
FrameTensor convnext_block(const FrameTensor& h, const WeightStore& weights, int block,
                           const ModelConfig& config);

// Final norm plus projection to 2N channels: the first N are log-magnitudes
// (exponentiated under the clip, so M > 0), the last N are phase angles.
SpectralFrames fourier_head(const FrameTensor& h, const WeightStore& weights, const ModelConfig& config);

// embed -> ConvNeXt blocks -> Fourier head -> iSTFT.
// Output length is (T - 1) * hop samples.
Waveform decode(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config);

// decode with the iSTFT stage timed separately (benchmark support).
Waveform decode_traced(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config,
                       double* istft_seconds);

}  // namespace flytts
