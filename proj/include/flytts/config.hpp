#pragma once

#include <string>

namespace flytts {

enum class DecoderKind {
    kConvNext,        // ConvNeXt blocks + Fourier head + iSTFT
    kTransposedConv,  // HiFi-GAN-shaped reference decoder
};

const char* to_string(DecoderKind kind);

inline constexpr float kDefaultNoiseScale = 0.667f;
inline constexpr float kDefaultLengthScale = 1.0f;

// All architecture hyperparameters. The grouped sharing plans are
// (g1, m1) for the text encoder and (g2, m2) for the flow.
struct ModelConfig {
    int g1 = 2;
    int m1 = 3;
    int g2 = 2;
    int m2 = 2;

    int hidden_dim = 192;       // text encoder width D
    int latent_dim = 192;       // prior/flow/decoder channel count D_z
    int heads = 2;
    int ffn_dim = 768;

    int flow_hidden_dim = 192;  // WaveNet projection width
    int flow_wn_layers = 4;
    int flow_kernel = 5;

    DecoderKind decoder_kind = DecoderKind::kConvNext;
    int decoder_dim = 512;      // ConvNeXt width
    int decoder_mid_dim = 1536; // inverse-bottleneck width
    int num_decoder_blocks = 6;

    int n_fft = 1024;
    int hop = 256;
    int vocab_size = 256;
    int sample_rate = 22050;

    int encoder_layers() const { return g1 * m1; }
    int flow_steps() const { return g2 * m2; }
    int fft_bins() const { return n_fft / 2 + 1; }

    void validate() const;  // throws std::invalid_argument
};

// "fly-tts", "mini-fly-tts" or "vits-base-shaped".
ModelConfig preset_config(const std::string& name);

}  // namespace flytts
