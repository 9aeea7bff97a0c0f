#include "flytts/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "flytts/nnkit.hpp"

namespace flytts {

std::string flow_step_slot(int step, std::string_view param) {
    return "flow.step" + std::to_string(step) + "." + std::string(param);
}

std::string flow_group_storage(int group, std::string_view param) {
    return "flow.group" + std::to_string(group) + "." + std::string(param);
}

std::vector<std::string> flow_wavenet_param_names(const ModelConfig& config) {
    std::vector<std::string> names;
    for (int j = 0; j < config.flow_wn_layers; ++j) {
        names.push_back("wn.in" + std::to_string(j) + ".weight");
        names.push_back("wn.in" + std::to_string(j) + ".bias");
        names.push_back("wn.res_skip" + std::to_string(j) + ".weight");
        names.push_back("wn.res_skip" + std::to_string(j) + ".bias");
    }
    return names;
}

namespace {

// Gated WaveNet stack: dilation-1 kernel-5 convolutions with tanh/sigmoid
// gates, residual connections, and accumulated skip outputs.
FrameTensor wavenet(const FrameTensor& x, const WeightStore& w, int step, const ModelConfig& cfg) {
    auto slot = [&](const std::string& p) -> const FrameTensor& { return w.at(flow_step_slot(step, p)); };

    const int hidden = cfg.flow_hidden_dim;
    const int t = x.dim(1);
    const int pad = (cfg.flow_kernel - 1) / 2;

    FrameTensor h = x;
    FrameTensor skip({hidden, t});
    for (int j = 0; j < cfg.flow_wn_layers; ++j) {
        const std::string tag = std::to_string(j);
        const FrameTensor gates =
            conv1d(h, slot("wn.in" + tag + ".weight"), slot("wn.in" + tag + ".bias").flat(), pad);

        FrameTensor acts({hidden, t});
        {
            const float* ga = gates.data.data();
            const float* gb = gates.data.data() + static_cast<size_t>(hidden) * t;
            float* out = acts.data.data();
            const size_t n = static_cast<size_t>(hidden) * t;
            for (size_t i = 0; i < n; ++i) {
                out[i] = std::tanh(ga[i]) / (1.0f + std::exp(-gb[i]));
            }
        }

        const FrameTensor rs =
            conv1d(acts, slot("wn.res_skip" + tag + ".weight"), slot("wn.res_skip" + tag + ".bias").flat(), 0);
        if (j < cfg.flow_wn_layers - 1) {
            // First half is the residual update, second half the skip slice.
            for (int c = 0; c < hidden; ++c) {
                for (int tt = 0; tt < t; ++tt) {
                    h.at(c, tt) += rs.at(c, tt);
                    skip.at(c, tt) += rs.at(hidden + c, tt);
                }
            }
        } else {
            for (int c = 0; c < hidden; ++c) {
                for (int tt = 0; tt < t; ++tt) {
                    skip.at(c, tt) += rs.at(c, tt);
                }
            }
        }
    }
    return skip;
}

FrameTensor coupling_shift(const FrameTensor& x_a, const WeightStore& w, int step,
                           const ModelConfig& cfg) {
    auto slot = [&](const std::string& p) -> const FrameTensor& { return w.at(flow_step_slot(step, p)); };
    const FrameTensor pre = conv1d(x_a, slot("pre.weight"), slot("pre.bias").flat(), 0);
    const FrameTensor features = wavenet(pre, w, step, cfg);
    return conv1d(features, slot("post.weight"), slot("post.bias").flat(), 0);
}

}  // namespace

FrameTensor coupling_step(const FrameTensor& x, const WeightStore& weights, int step,
                          const ModelConfig& config, FlowDirection direction) {
    if (x.rank() != 2) {
        throw std::invalid_argument("coupling_step: input must be [D_z x T], got " + shape_str(x));
    }
    const int d = x.dim(0);
    const int t = x.dim(1);
    if (d % 2 != 0) {
        throw std::invalid_argument("coupling_step: channel count must be even, got " + std::to_string(d));
    }
    const int half = d / 2;

    FrameTensor x_a({half, t});
    for (int c = 0; c < half; ++c) {
        for (int tt = 0; tt < t; ++tt) x_a.at(c, tt) = x.at(c, tt);
    }
    const FrameTensor shift = coupling_shift(x_a, weights, step, config);

    FrameTensor y = x;
    const float sign = direction == FlowDirection::kForward ? 1.0f : -1.0f;
    for (int c = 0; c < half; ++c) {
        for (int tt = 0; tt < t; ++tt) {
            y.at(half + c, tt) = x.at(half + c, tt) + sign * shift.at(c, tt);
        }
    }
    return y;
}

FrameTensor channel_flip(const FrameTensor& x) {
    if (x.rank() != 2) {
        throw std::invalid_argument("channel_flip: input must be rank 2, got " + shape_str(x));
    }
    const int d = x.dim(0);
    const int t = x.dim(1);
    FrameTensor y({d, t});
    for (int c = 0; c < d; ++c) {
        for (int tt = 0; tt < t; ++tt) y.at(c, tt) = x.at(d - 1 - c, tt);
    }
    return y;
}

FrameTensor flow_apply(const FrameTensor& z, const FlowPlan& plan, const WeightStore& weights,
                       const ModelConfig& config, FlowDirection direction) {
    std::vector<std::string> probe;
    for (int k = 0; k < plan.steps(); ++k) probe.push_back(flow_step_slot(k, "wn.in0.weight"));
    const int distinct = weights.distinct_storage_count(probe);
    if (distinct != plan.groups) {
        throw std::invalid_argument("flow_apply: weights carry " + std::to_string(distinct) +
                                    " distinct WaveNet storages, plan expects " + std::to_string(plan.groups));
    }

    FrameTensor x = z;
    if (direction == FlowDirection::kForward) {
        for (int k = 0; k < plan.steps(); ++k) {
            x = coupling_step(x, weights, k, config, FlowDirection::kForward);
            x = channel_flip(x);
        }
    } else {
        for (int k = plan.steps() - 1; k >= 0; --k) {
            x = channel_flip(x);
            x = coupling_step(x, weights, k, config, FlowDirection::kInverse);
        }
    }
    return x;
}

}  // namespace flytts
