#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flytts/config.hpp"
#include "flytts/tensor.hpp"
#include "flytts/weights.hpp"

namespace flytts {

struct DurationSeq {
    std::vector<int> frames_per_token;  // every entry >= 1

    std::int64_t total_frames() const {
        std::int64_t n = 0;
        for (int d : frames_per_token) n += d;
        return n;
    }
};

// Deterministic duration predictor: two kernel-3 convolutions with GELU and
// layer norm, then a scalar projection per token.
std::vector<float> predict_log_durations(const FrameTensor& hidden, const WeightStore& weights,
                                         const ModelConfig& config);

// d_i = max(1, ceil(exp(logd_i) * length_scale)).
DurationSeq durations_to_frames(std::span<const float> log_durations, float length_scale);

// Repeats column i of the input d_i times, order preserved.
FrameTensor repeat_columns(const FrameTensor& x, const DurationSeq& durations);

// Length regulation of the prior statistics.
std::pair<FrameTensor, FrameTensor> regulate(const FrameTensor& mean, const FrameTensor& logstd,
                                             const DurationSeq& durations);

}  // namespace flytts
