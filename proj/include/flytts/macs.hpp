#pragma once

#include <cstdint>

#include "flytts/config.hpp"

namespace flytts {

// Closed-form multiply-accumulate count of one convolution layer.
std::int64_t conv1d_macs(std::int64_t c_out, std::int64_t c_in, std::int64_t k, std::int64_t t_out);

// Analytic per-stage cost at a given acoustic frame count. Every stage is
// affine in the frame count; attention score terms (quadratic in sequence
// length) are excluded, projection costs are included. The encoder stage is
// evaluated at the same position count as the frame stages. The reference
// transposed-convolution decoder is always reported for comparison.
struct MacsReport {
    std::int64_t frames = 0;
    std::int64_t encoder = 0;   // transformer projections + duration predictor
    std::int64_t flow = 0;      // one directional pass over all K steps
    std::int64_t decoder = 0;   // the config's own decoder network
    std::int64_t istft = 0;     // zero for the transposed-conv decoder
    std::int64_t reference_decoder = 0;

    std::int64_t decoder_output_samples = 0;
    std::int64_t reference_output_samples = 0;

    std::int64_t total() const { return encoder + flow + decoder + istft; }
    double decoder_macs_per_sample() const;    // (decoder + istft) / samples
    double reference_macs_per_sample() const;
};

MacsReport estimate_macs(const ModelConfig& config, int frames);

}  // namespace flytts
