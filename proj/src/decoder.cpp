#include "flytts/decoder.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "flytts/nnkit.hpp"

namespace flytts {

std::string decoder_block_slot(int block, std::string_view param) {
    return "dec.block" + std::to_string(block) + "." + std::string(param);
}

FrameTensor embed_frames(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config) {
    if (z.rank() != 2 || z.dim(0) != config.latent_dim) {
        throw std::invalid_argument("embed_frames: latent must be [D_z x T], got " + shape_str(z));
    }
    FrameTensor h = conv1d(z, weights.at("dec.embed.weight"), weights.at("dec.embed.bias").flat(), 3);
    return layer_norm_frames(h, weights.at("dec.embed_ln.gamma").flat(),
                             weights.at("dec.embed_ln.beta").flat());
}

FrameTensor convnext_block(const FrameTensor& h, const WeightStore& weights, int block,
                           const ModelConfig& config) {
    if (h.rank() != 2 || h.dim(0) != config.decoder_dim) {
        throw std::invalid_argument("convnext_block: input must be [D_dec x T], got " + shape_str(h));
    }
    auto slot = [&](std::string_view p) -> const FrameTensor& {
        return weights.at(decoder_block_slot(block, p));
    };

    FrameTensor b = depthwise_conv1d(h, slot("dw.weight"), slot("dw.bias").flat(), 3);
    b = layer_norm_frames(b, slot("ln.gamma").flat(), slot("ln.beta").flat());
    b = linear_frames(b, slot("pw1.weight"), slot("pw1.bias").flat());
    gelu_inplace(b);
    b = linear_frames(b, slot("pw2.weight"), slot("pw2.bias").flat());

    const FrameTensor& scale = slot("scale");
    FrameTensor y = h;
    const int t = h.dim(1);
    for (int c = 0; c < config.decoder_dim; ++c) {
        const float s = scale.data[static_cast<size_t>(c)];
        for (int tt = 0; tt < t; ++tt) {
            y.at(c, tt) += s * b.at(c, tt);
        }
    }
    return y;
}

SpectralFrames fourier_head(const FrameTensor& h, const WeightStore& weights, const ModelConfig& config) {
    const FrameTensor normed = layer_norm_frames(h, weights.at("dec.final_ln.gamma").flat(),
                                                 weights.at("dec.final_ln.beta").flat());
    const FrameTensor coeffs =
        linear_frames(normed, weights.at("dec.head.weight"), weights.at("dec.head.bias").flat());

    const int bins = config.fft_bins();
    if (coeffs.dim(0) != 2 * bins) {
        throw std::invalid_argument("fourier_head: projection produced " + shape_str(coeffs) +
                                    ", expected " + std::to_string(2 * bins) + " rows");
    }
    const int t = coeffs.dim(1);
    SpectralFrames out;
    out.magnitude = FrameTensor({bins, t});
    out.phase = FrameTensor({bins, t});
    for (int k = 0; k < bins; ++k) {
        for (int tt = 0; tt < t; ++tt) {
            const float logm = std::min(coeffs.at(k, tt), kLogMagnitudeClip);
            out.magnitude.at(k, tt) = std::exp(logm);
            out.phase.at(k, tt) = coeffs.at(bins + k, tt);
        }
    }
    return out;
}

Waveform decode(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config) {
    return decode_traced(z, weights, config, nullptr);
}

Waveform decode_traced(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config,
                       double* istft_seconds) {
    if (z.rank() != 2 || z.dim(1) < 1) {
        throw std::invalid_argument("decode: latent must be [D_z x T] with T >= 1");
    }
    const int t = z.dim(1);

    FrameTensor h = embed_frames(z, weights, config);
    for (int b = 0; b < config.num_decoder_blocks; ++b) {
        h = convnext_block(h, weights, b, config);
    }
    const SpectralFrames spec = fourier_head(h, weights, config);

    const auto t0 = std::chrono::steady_clock::now();
    Waveform y = istft(spec, StftConfig::hann(config.n_fft, config.hop), config.sample_rate);
    if (istft_seconds) {
        *istft_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    const size_t expected = static_cast<size_t>(t - 1) * config.hop;
    if (y.samples.size() != expected) {
        throw std::logic_error("decode: produced " + std::to_string(y.samples.size()) +
                               " samples, expected " + std::to_string(expected));
    }
    return y;
}

}  // namespace flytts
