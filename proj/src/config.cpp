#include "flytts/config.hpp"

#include <stdexcept>

namespace flytts {

const char* to_string(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::kConvNext: return "convnext";
        case DecoderKind::kTransposedConv: return "transposed-conv";
    }
    return "unknown";
}

void ModelConfig::validate() const {
    auto positive = [](int v, const char* what) {
        if (v <= 0) throw std::invalid_argument(std::string("ModelConfig: ") + what + " must be positive");
    };
    positive(g1, "g1");
    positive(m1, "m1");
    positive(g2, "g2");
    positive(m2, "m2");
    positive(hidden_dim, "hidden_dim");
    positive(latent_dim, "latent_dim");
    positive(heads, "heads");
    positive(ffn_dim, "ffn_dim");
    positive(flow_hidden_dim, "flow_hidden_dim");
    positive(flow_wn_layers, "flow_wn_layers");
    positive(flow_kernel, "flow_kernel");
    positive(n_fft, "n_fft");
    positive(hop, "hop");
    positive(vocab_size, "vocab_size");
    positive(sample_rate, "sample_rate");

    if ((n_fft & (n_fft - 1)) != 0) {
        throw std::invalid_argument("ModelConfig: n_fft must be a power of two");
    }
    if (hop > n_fft / 2) {
        throw std::invalid_argument("ModelConfig: hop must be <= n_fft/2");
    }
    if (hidden_dim % heads != 0) {
        throw std::invalid_argument("ModelConfig: hidden_dim must be divisible by heads");
    }
    if (latent_dim % 2 != 0) {
        throw std::invalid_argument("ModelConfig: latent_dim must be even");
    }
    if (flow_kernel % 2 == 0) {
        throw std::invalid_argument("ModelConfig: flow_kernel must be odd");
    }
    if (decoder_kind == DecoderKind::kConvNext) {
        positive(decoder_dim, "decoder_dim");
        positive(decoder_mid_dim, "decoder_mid_dim");
        positive(num_decoder_blocks, "num_decoder_blocks");
    }
}

ModelConfig preset_config(const std::string& name) {
    ModelConfig cfg;
    if (name == "fly-tts") {
        cfg.g1 = 2;
        cfg.m1 = 3;
        cfg.g2 = 2;
        cfg.m2 = 2;
        cfg.num_decoder_blocks = 6;
        cfg.decoder_kind = DecoderKind::kConvNext;
    } else if (name == "mini-fly-tts") {
        cfg.g1 = 1;
        cfg.m1 = 6;
        cfg.g2 = 1;
        cfg.m2 = 4;
        cfg.num_decoder_blocks = 4;
        cfg.decoder_kind = DecoderKind::kConvNext;
    } else if (name == "vits-base-shaped") {
        cfg.g1 = 6;
        cfg.m1 = 1;
        cfg.g2 = 4;
        cfg.m2 = 1;
        cfg.num_decoder_blocks = 0;
        cfg.decoder_kind = DecoderKind::kTransposedConv;
    } else {
        throw std::invalid_argument("unknown preset '" + name +
                                    "' (expected fly-tts, mini-fly-tts or vits-base-shaped)");
    }
    cfg.validate();
    return cfg;
}

}  // namespace flytts
