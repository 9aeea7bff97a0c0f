#include "flytts/model.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "flytts/decoder.hpp"
#include "flytts/duration.hpp"
#include "flytts/flow.hpp"
#include "flytts/reference_decoder.hpp"
#include "flytts/rng.hpp"

namespace flytts {

namespace {

// Uniform fill scaled by tensor fan-in; the stream is keyed by the storage
// name so stores are reproducible regardless of creation order.
FrameTensor uniform_tensor(const std::string& name, std::vector<int> shape, int fan_in,
                           std::uint64_t seed) {
    FrameTensor t(std::move(shape));
    Rng rng(seed ^ fnv1a64(name));
    const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
    for (float& v : t.data) v = rng.next_symmetric(bound);
    return t;
}

FrameTensor const_tensor(std::vector<int> shape, float value) {
    FrameTensor t(std::move(shape), value);
    return t;
}

void add_uniform(WeightStore& s, const std::string& name, std::vector<int> shape, int fan_in,
                 std::uint64_t seed) {
    s.add(name, uniform_tensor(name, std::move(shape), fan_in, seed));
}

void add_conv(WeightStore& s, const std::string& prefix, int c_out, int c_in, int k,
              std::uint64_t seed) {
    add_uniform(s, prefix + ".weight", {c_out, c_in, k}, c_in * k, seed);
    s.add(prefix + ".bias", const_tensor({c_out}, 0.0f));
}

void add_linear(WeightStore& s, const std::string& prefix, int out, int in, std::uint64_t seed) {
    add_uniform(s, prefix + ".weight", {out, in}, in, seed);
    s.add(prefix + ".bias", const_tensor({out}, 0.0f));
}

void add_norm(WeightStore& s, const std::string& prefix, int c) {
    s.add(prefix + ".gamma", const_tensor({c}, 1.0f));
    s.add(prefix + ".beta", const_tensor({c}, 0.0f));
}

// Group-storage variants used by the shared stacks.
void add_norm_storage(WeightStore& s, const std::string& name_prefix, int c) {
    s.add_storage(name_prefix + ".gamma", const_tensor({c}, 1.0f));
    s.add_storage(name_prefix + ".beta", const_tensor({c}, 0.0f));
}

}  // namespace

void init_text_encoder_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed) {
    const int d = config.hidden_dim;

    add_uniform(store, kEncoderEmbedding, {config.vocab_size, d}, d, seed);

    for (int g = 0; g < config.g1; ++g) {
        add_norm_storage(store, encoder_group_storage(g, "ln1"), d);
        add_norm_storage(store, encoder_group_storage(g, "ln2"), d);
        for (const char* name : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"}) {
            const std::string storage = encoder_group_storage(g, name);
            store.add_storage(storage, uniform_tensor(storage, {d, d}, d, seed));
        }
        for (const char* name : {"attn.bq", "attn.bk", "attn.bv", "attn.bo"}) {
            store.add_storage(encoder_group_storage(g, name), const_tensor({d}, 0.0f));
        }
        const std::string w1 = encoder_group_storage(g, "ffn.w1");
        store.add_storage(w1, uniform_tensor(w1, {config.ffn_dim, d}, d, seed));
        store.add_storage(encoder_group_storage(g, "ffn.b1"), const_tensor({config.ffn_dim}, 0.0f));
        const std::string w2 = encoder_group_storage(g, "ffn.w2");
        store.add_storage(w2, uniform_tensor(w2, {d, config.ffn_dim}, config.ffn_dim, seed));
        store.add_storage(encoder_group_storage(g, "ffn.b2"), const_tensor({d}, 0.0f));
    }

    const SharingPlan plan{config.g1, config.m1};
    for (int layer = 0; layer < plan.total_layers(); ++layer) {
        const int g = group_index(layer, plan);
        for (const auto& param : encoder_layer_param_names()) {
            store.bind(encoder_layer_slot(layer, param), encoder_group_storage(g, param));
        }
    }

    add_norm(store, "text_enc.final_ln", d);
    add_linear(store, "text_enc.proj", 2 * config.latent_dim, d, seed);
}

void init_duration_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed) {
    const int d = config.hidden_dim;
    add_conv(store, "dur.conv1", d, d, 3, seed);
    add_norm(store, "dur.ln1", d);
    add_conv(store, "dur.conv2", d, d, 3, seed);
    add_norm(store, "dur.ln2", d);
    add_linear(store, "dur.proj", 1, d, seed);
}

void init_flow_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed) {
    const int half = config.latent_dim / 2;
    const int hidden = config.flow_hidden_dim;
    const int k = config.flow_kernel;

    for (int g = 0; g < config.g2; ++g) {
        for (int j = 0; j < config.flow_wn_layers; ++j) {
            const std::string in_w = flow_group_storage(g, "wn.in" + std::to_string(j) + ".weight");
            store.add_storage(in_w, uniform_tensor(in_w, {2 * hidden, hidden, k}, hidden * k, seed));
            store.add_storage(flow_group_storage(g, "wn.in" + std::to_string(j) + ".bias"),
                              const_tensor({2 * hidden}, 0.0f));

            const int rs_out = j < config.flow_wn_layers - 1 ? 2 * hidden : hidden;
            const std::string rs_w = flow_group_storage(g, "wn.res_skip" + std::to_string(j) + ".weight");
            store.add_storage(rs_w, uniform_tensor(rs_w, {rs_out, hidden, 1}, hidden, seed));
            store.add_storage(flow_group_storage(g, "wn.res_skip" + std::to_string(j) + ".bias"),
                              const_tensor({rs_out}, 0.0f));
        }
    }

    const FlowPlan plan{config.g2, config.m2};
    for (int step = 0; step < plan.steps(); ++step) {
        const int g = step / config.m2;
        for (const auto& param : flow_wavenet_param_names(config)) {
            store.bind(flow_step_slot(step, param), flow_group_storage(g, param));
        }
        add_conv(store, flow_step_slot(step, "pre"), hidden, half, 1, seed);
        add_conv(store, flow_step_slot(step, "post"), half, hidden, 1, seed);
    }
}

void init_decoder_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed) {
    const int dec = config.decoder_dim;

    add_conv(store, "dec.embed", dec, config.latent_dim, 7, seed);
    add_norm(store, "dec.embed_ln", dec);

    const float scale_init = 1.0f / static_cast<float>(config.num_decoder_blocks);
    for (int b = 0; b < config.num_decoder_blocks; ++b) {
        const std::string dw = decoder_block_slot(b, "dw.weight");
        store.add(dw, uniform_tensor(dw, {dec, 7}, 7, seed));
        store.add(decoder_block_slot(b, "dw.bias"), const_tensor({dec}, 0.0f));
        add_norm(store, decoder_block_slot(b, "ln"), dec);
        add_linear(store, decoder_block_slot(b, "pw1"), config.decoder_mid_dim, dec, seed);
        add_linear(store, decoder_block_slot(b, "pw2"), dec, config.decoder_mid_dim, seed);
        store.add(decoder_block_slot(b, "scale"), const_tensor({dec}, scale_init));
    }

    add_norm(store, "dec.final_ln", dec);
    add_linear(store, "dec.head", 2 * config.fft_bins(), dec, seed);
}

void init_reference_decoder_weights(WeightStore& store, const ModelConfig& config, std::uint64_t seed) {
    const ReferenceDecoderShape shape = reference_decoder_shape();

    add_conv(store, "ref.conv_pre", shape.initial_channels, config.latent_dim, 7, seed);

    int ch = shape.initial_channels;
    for (int level = 0; level < 4; ++level) {
        const std::string up = "ref.up" + std::to_string(level);
        const int ch_out = shape.channels_at(level);
        const int k = shape.upsample_kernels[static_cast<size_t>(level)];
        // Transposed conv weight layout is [C_in x C_out x K].
        add_uniform(store, up + ".weight", {ch, ch_out, k}, ch * k, seed);
        store.add(up + ".bias", const_tensor({ch_out}, 0.0f));

        for (size_t j = 0; j < shape.resblock_kernels.size(); ++j) {
            const int kernel = shape.resblock_kernels[j];
            for (size_t p = 0; p < shape.resblock_dilations.size(); ++p) {
                const std::string pair = up + ".res" + std::to_string(j) + ".pair" + std::to_string(p);
                add_conv(store, pair + ".c1", ch_out, ch_out, kernel, seed);
                add_conv(store, pair + ".c2", ch_out, ch_out, kernel, seed);
            }
        }
        ch = ch_out;
    }

    add_conv(store, "ref.conv_post", 1, ch, 7, seed);
}

void init_prediction_head_weights(WeightStore& store, int feature_dim, int hidden_dim,
                                  std::uint64_t seed) {
    add_conv(store, "disc.conv1", hidden_dim, feature_dim, 3, seed);
    add_conv(store, "disc.conv2", hidden_dim, hidden_dim, 3, seed);
    add_conv(store, "disc.conv3", hidden_dim, hidden_dim, 3, seed);
    add_linear(store, "disc.proj", 1, hidden_dim, seed);
}

WeightStore init_weights(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    WeightStore store;
    init_text_encoder_weights(store, config, seed);
    init_duration_weights(store, config, seed);
    init_flow_weights(store, config, seed);
    if (config.decoder_kind == DecoderKind::kConvNext) {
        init_decoder_weights(store, config, seed);
    } else {
        init_reference_decoder_weights(store, config, seed);
    }
    store.validate();
    return store;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Waveform synthesize(const TokenSeq& tokens, const WeightStore& store, const ModelConfig& config,
                    float noise_scale, float length_scale, std::uint64_t seed) {
    return synthesize_traced(tokens, store, config, noise_scale, length_scale, seed, nullptr);
}

Waveform synthesize_traced(const TokenSeq& tokens, const WeightStore& store, const ModelConfig& config,
                           float noise_scale, float length_scale, std::uint64_t seed,
                           StageSeconds* stages) {
    if (tokens.ids.empty()) {
        throw std::invalid_argument("synthesize: empty token sequence");
    }

    auto t0 = std::chrono::steady_clock::now();
    const SharingPlan plan{config.g1, config.m1};
    const EncodedText enc = encode_text(tokens, store, plan, config);

    const std::vector<float> logd = predict_log_durations(enc.hidden, store, config);
    const DurationSeq durations = durations_to_frames(logd, length_scale);
    auto [mean, logstd] = regulate(enc.prior_mean, enc.prior_logstd, durations);
    if (stages) stages->encoder = seconds_since(t0);

    FrameTensor z_p = mean;
    if (noise_scale != 0.0f) {
        Rng rng(seed ^ fnv1a64("synth.noise"));
        for (size_t i = 0; i < z_p.data.size(); ++i) {
            z_p.data[i] += noise_scale * std::exp(logstd.data[i]) * rng.next_normal();
        }
    }

    t0 = std::chrono::steady_clock::now();
    const FlowPlan flow_plan{config.g2, config.m2};
    const FrameTensor z = flow_apply(z_p, flow_plan, store, config, FlowDirection::kInverse);
    if (stages) stages->flow = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    Waveform y;
    double istft_seconds = 0.0;
    if (config.decoder_kind == DecoderKind::kConvNext) {
        y = decode_traced(z, store, config, &istft_seconds);
    } else {
        y = reference_decode(z, store, config);
    }
    if (stages) {
        stages->decoder = seconds_since(t0) - istft_seconds;
        stages->istft = istft_seconds;
    }

    const std::int64_t total = durations.total_frames();
    const std::int64_t expected = config.decoder_kind == DecoderKind::kConvNext
                                      ? (total - 1) * config.hop
                                      : total * reference_decoder_shape().total_upsample();
    if (static_cast<std::int64_t>(y.samples.size()) != expected) {
        throw std::logic_error("synthesize: frame accounting mismatch");
    }
    return y;
}

}  // namespace flytts
