#include "flytts/macs.hpp"

#include <cmath>
#include <stdexcept>

#include "flytts/reference_decoder.hpp"

namespace flytts {

std::int64_t conv1d_macs(std::int64_t c_out, std::int64_t c_in, std::int64_t k, std::int64_t t_out) {
    return c_out * c_in * k * t_out;
}

namespace {

std::int64_t encoder_macs(const ModelConfig& cfg, std::int64_t t) {
    const std::int64_t d = cfg.hidden_dim;
    const std::int64_t per_layer = 4 * d * d * t + 2 * d * cfg.ffn_dim * t;
    std::int64_t total = cfg.encoder_layers() * per_layer;
    total += conv1d_macs(2 * cfg.latent_dim, d, 1, t);  // prior projection
    total += 2 * conv1d_macs(d, d, 3, t) + conv1d_macs(1, d, 1, t);  // duration predictor
    return total;
}

std::int64_t flow_macs(const ModelConfig& cfg, std::int64_t t) {
    const std::int64_t half = cfg.latent_dim / 2;
    const std::int64_t h = cfg.flow_hidden_dim;
    std::int64_t per_step = conv1d_macs(h, half, 1, t) + conv1d_macs(half, h, 1, t);
    for (int j = 0; j < cfg.flow_wn_layers; ++j) {
        per_step += conv1d_macs(2 * h, h, cfg.flow_kernel, t);
        const std::int64_t rs_out = j < cfg.flow_wn_layers - 1 ? 2 * h : h;
        per_step += conv1d_macs(rs_out, h, 1, t);
    }
    return cfg.flow_steps() * per_step;
}

std::int64_t convnext_decoder_macs(const ModelConfig& cfg, std::int64_t t) {
    const std::int64_t dec = cfg.decoder_dim;
    std::int64_t total = conv1d_macs(dec, cfg.latent_dim, 7, t);  // embed
    const std::int64_t per_block = dec * 7 * t                    // depthwise
                                   + conv1d_macs(cfg.decoder_mid_dim, dec, 1, t)
                                   + conv1d_macs(dec, cfg.decoder_mid_dim, 1, t);
    total += cfg.num_decoder_blocks * per_block;
    total += conv1d_macs(2 * cfg.fft_bins(), dec, 1, t);  // Fourier head
    return total;
}

std::int64_t istft_macs(const ModelConfig& cfg, std::int64_t t) {
    const std::int64_t n = cfg.n_fft;
    const auto log2n = static_cast<std::int64_t>(std::lround(std::log2(static_cast<double>(n))));
    // Radix-2 inverse FFT plus window/overlap-add per frame.
    return t * (2 * n * log2n + 2 * n);
}

std::int64_t reference_decoder_macs(const ModelConfig& cfg, std::int64_t t) {
    const ReferenceDecoderShape shape = reference_decoder_shape();
    std::int64_t total = conv1d_macs(shape.initial_channels, cfg.latent_dim, 7, t);

    std::int64_t ch = shape.initial_channels;
    std::int64_t frames = t;
    for (int level = 0; level < 4; ++level) {
        const std::int64_t ch_out = shape.channels_at(level);
        const std::int64_t k = shape.upsample_kernels[static_cast<size_t>(level)];
        // Transposed conv: every input frame contributes K taps per channel pair.
        total += ch * ch_out * k * frames;
        frames *= shape.upsample_rates[static_cast<size_t>(level)];

        std::int64_t kernel_sum = 0;
        for (int kernel : shape.resblock_kernels) kernel_sum += kernel;
        const std::int64_t convs_per_kernel = 2 * static_cast<std::int64_t>(shape.resblock_dilations.size());
        total += convs_per_kernel * kernel_sum * ch_out * ch_out * frames;
        ch = ch_out;
    }
    total += conv1d_macs(1, ch, 7, frames);
    return total;
}

}  // namespace

double MacsReport::decoder_macs_per_sample() const {
    if (decoder_output_samples <= 0) return 0.0;
    return static_cast<double>(decoder + istft) / static_cast<double>(decoder_output_samples);
}

double MacsReport::reference_macs_per_sample() const {
    if (reference_output_samples <= 0) return 0.0;
    return static_cast<double>(reference_decoder) / static_cast<double>(reference_output_samples);
}

MacsReport estimate_macs(const ModelConfig& config, int frames) {
    if (frames < 2) throw std::invalid_argument("estimate_macs: frames must be >= 2");
    config.validate();

    const std::int64_t t = frames;
    MacsReport r;
    r.frames = t;
    r.encoder = encoder_macs(config, t);
    r.flow = flow_macs(config, t);
    r.reference_decoder = reference_decoder_macs(config, t);
    r.reference_output_samples = t * reference_decoder_shape().total_upsample();

    if (config.decoder_kind == DecoderKind::kConvNext) {
        r.decoder = convnext_decoder_macs(config, t);
        r.istft = istft_macs(config, t);
        r.decoder_output_samples = (t - 1) * config.hop;
    } else {
        r.decoder = r.reference_decoder;
        r.istft = 0;
        r.decoder_output_samples = r.reference_output_samples;
    }
    return r;
}

}  // namespace flytts
