#include "flytts/duration.hpp"

#include <cmath>
#include <stdexcept>

#include "flytts/nnkit.hpp"

namespace flytts {

std::vector<float> predict_log_durations(const FrameTensor& hidden, const WeightStore& weights,
                                         const ModelConfig& config) {
    if (hidden.rank() != 2 || hidden.dim(0) != config.hidden_dim) {
        throw std::invalid_argument("predict_log_durations: hidden must be [D x T_text], got " +
                                    shape_str(hidden));
    }

    FrameTensor h = conv1d(hidden, weights.at("dur.conv1.weight"), weights.at("dur.conv1.bias").flat(), 1);
    gelu_inplace(h);
    h = layer_norm_frames(h, weights.at("dur.ln1.gamma").flat(), weights.at("dur.ln1.beta").flat());

    h = conv1d(h, weights.at("dur.conv2.weight"), weights.at("dur.conv2.bias").flat(), 1);
    gelu_inplace(h);
    h = layer_norm_frames(h, weights.at("dur.ln2.gamma").flat(), weights.at("dur.ln2.beta").flat());

    const FrameTensor out =
        linear_frames(h, weights.at("dur.proj.weight"), weights.at("dur.proj.bias").flat());
    return {out.data.begin(), out.data.end()};
}

DurationSeq durations_to_frames(std::span<const float> log_durations, float length_scale) {
    if (!(length_scale > 0.0f)) {
        throw std::invalid_argument("durations_to_frames: length_scale must be > 0");
    }
    DurationSeq seq;
    seq.frames_per_token.reserve(log_durations.size());
    for (float logd : log_durations) {
        if (!std::isfinite(logd)) {
            throw std::invalid_argument("durations_to_frames: non-finite log-duration");
        }
        // Single-precision like the rest of the engine; keeps round log
        // durations landing on exact integers before the ceil.
        const float frames = std::ceil(std::exp(logd) * length_scale);
        seq.frames_per_token.push_back(static_cast<int>(std::max(1.0f, frames)));
    }
    return seq;
}

FrameTensor repeat_columns(const FrameTensor& x, const DurationSeq& durations) {
    if (x.rank() != 2) {
        throw std::invalid_argument("repeat_columns: input must be rank 2, got " + shape_str(x));
    }
    const int t_in = x.dim(1);
    if (static_cast<int>(durations.frames_per_token.size()) != t_in) {
        throw std::invalid_argument("repeat_columns: " + std::to_string(durations.frames_per_token.size()) +
                                    " durations for " + std::to_string(t_in) + " columns");
    }
    const int c = x.dim(0);
    const std::int64_t t_out = durations.total_frames();
    FrameTensor y({c, static_cast<int>(t_out)});
    int col = 0;
    for (int tt = 0; tt < t_in; ++tt) {
        for (int r = 0; r < durations.frames_per_token[static_cast<size_t>(tt)]; ++r, ++col) {
            for (int ci = 0; ci < c; ++ci) y.at(ci, col) = x.at(ci, tt);
        }
    }
    return y;
}

std::pair<FrameTensor, FrameTensor> regulate(const FrameTensor& mean, const FrameTensor& logstd,
                                             const DurationSeq& durations) {
    if (!mean.same_shape(logstd)) {
        throw std::invalid_argument("regulate: mean " + shape_str(mean) + " and logstd " +
                                    shape_str(logstd) + " differ");
    }
    return {repeat_columns(mean, durations), repeat_columns(logstd, durations)};
}

}  // namespace flytts
