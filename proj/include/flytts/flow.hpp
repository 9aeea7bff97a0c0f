#pragma once

#include <string>
#include <string_view>

#include "flytts/config.hpp"
#include "flytts/tensor.hpp"
#include "flytts/weights.hpp"

namespace flytts {

enum class FlowDirection { kForward, kInverse };

// K = groups * steps_per_group coupling steps. Within a group all steps share
// one WaveNet projection storage; every step keeps its own pre/post 1x1
// convolutions.
struct FlowPlan {
    int groups = 2;
    int steps_per_group = 2;

    int steps() const { return groups * steps_per_group; }
};

std::string flow_step_slot(int step, std::string_view param);
std::string flow_group_storage(int group, std::string_view param);

// Names of the WaveNet projection tensors (the shared part of a step).
std::vector<std::string> flow_wavenet_param_names(const ModelConfig& config);

// Mean-only affine coupling over [D_z x T]: the first channel half passes
// through unchanged, the second half is shifted by
// post_conv(WaveNet(pre_conv(x_a))). Log-determinant is identically zero.
FrameTensor coupling_step(const FrameTensor& x, const WeightStore& weights, int step,
                          const ModelConfig& config, FlowDirection direction);

// Reverses channel order; its own inverse.
FrameTensor channel_flip(const FrameTensor& x);

// Applies all K coupling steps, each followed by a channel flip. The inverse
// direction applies exact inverses in reverse order; inference runs inverse
// (prior sample -> decoder latent).
FrameTensor flow_apply(const FrameTensor& z, const FlowPlan& plan, const WeightStore& weights,
                       const ModelConfig& config, FlowDirection direction);

}  // namespace flytts
