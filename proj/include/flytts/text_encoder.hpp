#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flytts/config.hpp"
#include "flytts/tensor.hpp"
#include "flytts/weights.hpp"

namespace flytts {

struct TokenSeq {
    std::vector<int> ids;

    int length() const { return static_cast<int>(ids.size()); }
};

// Byte-level fallback tokenizer: one token per UTF-8 byte.
TokenSeq tokens_from_text(std::string_view text);

// Whitespace-separated non-negative integers.
TokenSeq tokens_from_file(const std::string& path);

// Sequential grouped sharing: g groups of m consecutive layers, layer i is
// served by parameter set floor(i/m). g == 1 is complete sharing, m == 1 is
// a fully unshared stack.
struct SharingPlan {
    int groups = 1;
    int layers_per_group = 1;

    int total_layers() const { return groups * layers_per_group; }
};

int group_index(int layer_i, const SharingPlan& plan);

struct EncodedText {
    FrameTensor hidden;        // [D x T_text]
    FrameTensor prior_mean;    // [D_z x T_text]
    FrameTensor prior_logstd;  // [D_z x T_text]
};

// Slot naming. Layer slots alias group storages; embedding, final norm and
// the prior projection are unshared.
std::string encoder_layer_slot(int layer, std::string_view param);
std::string encoder_group_storage(int group, std::string_view param);
inline constexpr const char* kEncoderEmbedding = "text_enc.embed.weight";
inline constexpr const char* kEncoderFinalGamma = "text_enc.final_ln.gamma";
inline constexpr const char* kEncoderFinalBeta = "text_enc.final_ln.beta";
inline constexpr const char* kEncoderProjWeight = "text_enc.proj.weight";
inline constexpr const char* kEncoderProjBias = "text_enc.proj.bias";

// Per-layer parameter names within a layer slot / group storage.
std::vector<std::string> encoder_layer_param_names();

// Sinusoidal absolute position embeddings, [D x T].
FrameTensor sinusoidal_positions(int d, int t);

// Scaled token embedding plus positions, g*m pre-norm transformer layers
// (layer i reads parameter set group_index(i)), final norm, then a linear
// projection to the prior (mean, logstd).
EncodedText encode_text(const TokenSeq& tokens, const WeightStore& weights,
                        const SharingPlan& plan, const ModelConfig& config);

}  // namespace flytts
