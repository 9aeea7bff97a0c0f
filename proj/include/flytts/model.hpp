#pragma once

#include <cstdint>

#include "flytts/config.hpp"
#include "flytts/spectral.hpp"
#include "flytts/text_encoder.hpp"
#include "flytts/weights.hpp"

namespace flytts {

// Deterministic pseudo-random initialization: every storage is filled from a
// SplitMix64 stream seeded by (seed XOR fnv1a64(storage name)), weights
// uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero, norm gains one.
// The alias tables realize the (g1, m1) and (g2, m2) sharing plans.
WeightStore init_weights(const ModelConfig& config, std::uint64_t seed);

// Per-module initializers; init_weights composes them.
void init_text_encoder_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed);
void init_duration_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed);
void init_flow_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed);
void init_decoder_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed);
void init_reference_decoder_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed);

// Discriminator prediction head over feature_dim-channel inputs; kept in its
// own store, separate from the generator weights.
void init_prediction_head_weights(WeightStore& store, int feature_dim, int hidden_dim,
                                  std::uint64_t seed);

struct StageSeconds {
    double encoder = 0.0;  // text encoding + duration prediction + regulation
    double flow = 0.0;
    double decoder = 0.0;  // decoder network excluding iSTFT
    double istft = 0.0;
};

// Full inference path: encode text, predict durations, regulate the prior,
// sample z_p = mean + noise_scale * exp(logstd) * eps(seed), run the flow
// inverse, decode to a waveform. Deterministic for fixed (tokens, store,
// seed, scales); noise_scale == 0 skips sampling entirely.
Waveform synthesize(const TokenSeq& tokens, const WeightStore& store, const ModelConfig& config,
                    float noise_scale = kDefaultNoiseScale, float length_scale = kDefaultLengthScale,
                    std::uint64_t seed = 0);

Waveform synthesize_traced(const TokenSeq& tokens, const WeightStore& store, const ModelConfig& config,
                           float noise_scale, float length_scale, std::uint64_t seed,
                           StageSeconds* stages);

}  // namespace flytts
