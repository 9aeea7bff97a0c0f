#include "flytts/text_encoder.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "flytts/nnkit.hpp"

namespace flytts {

TokenSeq tokens_from_text(std::string_view text) {
    TokenSeq seq;
    seq.ids.reserve(text.size());
    for (unsigned char c : text) seq.ids.push_back(static_cast<int>(c));
    return seq;
}

TokenSeq tokens_from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open token file '" + path + "'");
    TokenSeq seq;
    long long v = 0;
    while (f >> v) {
        if (v < 0) throw std::runtime_error("token file '" + path + "' contains a negative id");
        seq.ids.push_back(static_cast<int>(v));
    }
    if (!f.eof()) throw std::runtime_error("token file '" + path + "' contains a non-integer entry");
    return seq;
}

int group_index(int layer_i, const SharingPlan& plan) {
    if (layer_i < 0 || layer_i >= plan.total_layers()) {
        throw std::invalid_argument("group_index: layer " + std::to_string(layer_i) +
                                    " out of range for " + std::to_string(plan.total_layers()) + " layers");
    }
    return layer_i / plan.layers_per_group;
}

std::string encoder_layer_slot(int layer, std::string_view param) {
    return "text_enc.layer" + std::to_string(layer) + "." + std::string(param);
}

std::string encoder_group_storage(int group, std::string_view param) {
    return "text_enc.group" + std::to_string(group) + "." + std::string(param);
}

std::vector<std::string> encoder_layer_param_names() {
    return {
        "ln1.gamma", "ln1.beta",
        "attn.wq", "attn.bq", "attn.wk", "attn.bk",
        "attn.wv", "attn.bv", "attn.wo", "attn.bo",
        "ln2.gamma", "ln2.beta",
        "ffn.w1", "ffn.b1", "ffn.w2", "ffn.b2",
    };
}

FrameTensor sinusoidal_positions(int d, int t) {
    FrameTensor pe({d, t});
    for (int i = 0; i < d; i += 2) {
        const double rate = std::pow(10000.0, -static_cast<double>(i) / d);
        for (int tt = 0; tt < t; ++tt) {
            const double a = tt * rate;
            pe.at(i, tt) = static_cast<float>(std::sin(a));
            if (i + 1 < d) pe.at(i + 1, tt) = static_cast<float>(std::cos(a));
        }
    }
    return pe;
}

namespace {

// One pre-norm transformer layer over [D x T], reading parameters through
// the slot table so group aliasing stays transparent.
FrameTensor encoder_layer(const FrameTensor& x, const WeightStore& w, int layer,
                          const ModelConfig& cfg) {
    auto slot = [&](std::string_view p) -> const FrameTensor& {
        return w.at(encoder_layer_slot(layer, p));
    };

    AttentionWeights attn;
    attn.wq = &slot("attn.wq");
    attn.wk = &slot("attn.wk");
    attn.wv = &slot("attn.wv");
    attn.wo = &slot("attn.wo");
    attn.bq = &slot("attn.bq");
    attn.bk = &slot("attn.bk");
    attn.bv = &slot("attn.bv");
    attn.bo = &slot("attn.bo");

    FrameTensor h = x;
    {
        const FrameTensor normed = layer_norm_frames(h, slot("ln1.gamma").flat(), slot("ln1.beta").flat());
        const FrameTensor a = multi_head_attention(normed, attn, cfg.heads);
        for (size_t i = 0; i < h.data.size(); ++i) h.data[i] += a.data[i];
    }
    {
        const FrameTensor normed = layer_norm_frames(h, slot("ln2.gamma").flat(), slot("ln2.beta").flat());
        FrameTensor f = linear_frames(normed, slot("ffn.w1"), slot("ffn.b1").flat());
        gelu_inplace(f);
        const FrameTensor f2 = linear_frames(f, slot("ffn.w2"), slot("ffn.b2").flat());
        for (size_t i = 0; i < h.data.size(); ++i) h.data[i] += f2.data[i];
    }
    return h;
}

}  // namespace

EncodedText encode_text(const TokenSeq& tokens, const WeightStore& weights,
                        const SharingPlan& plan, const ModelConfig& config) {
    if (tokens.ids.empty()) {
        throw std::invalid_argument("encode_text: empty token sequence");
    }
    for (int id : tokens.ids) {
        if (id < 0 || id >= config.vocab_size) {
            throw std::invalid_argument("encode_text: token id " + std::to_string(id) +
                                        " outside vocabulary of size " + std::to_string(config.vocab_size));
        }
    }

    std::vector<std::string> probe_slots;
    for (int layer = 0; layer < plan.total_layers(); ++layer) {
        probe_slots.push_back(encoder_layer_slot(layer, "attn.wq"));
    }
    const int distinct = weights.distinct_storage_count(probe_slots);
    if (distinct != plan.groups) {
        throw std::invalid_argument("encode_text: weights carry " + std::to_string(distinct) +
                                    " distinct layer parameter sets, plan expects " +
                                    std::to_string(plan.groups));
    }

    const int d = config.hidden_dim;
    const int t = tokens.length();
    const FrameTensor& emb = weights.at(kEncoderEmbedding);
    if (emb.rank() != 2 || emb.dim(0) != config.vocab_size || emb.dim(1) != d) {
        throw std::invalid_argument("encode_text: embedding table has shape " + shape_str(emb));
    }

    const FrameTensor pos = sinusoidal_positions(d, t);
    const float scale = std::sqrt(static_cast<float>(d));
    FrameTensor h({d, t});
    for (int tt = 0; tt < t; ++tt) {
        const int id = tokens.ids[static_cast<size_t>(tt)];
        for (int di = 0; di < d; ++di) {
            h.at(di, tt) = emb.at(id, di) * scale + pos.at(di, tt);
        }
    }

    for (int layer = 0; layer < plan.total_layers(); ++layer) {
        h = encoder_layer(h, weights, layer, config);
    }

    EncodedText out;
    out.hidden = layer_norm_frames(h, weights.at(kEncoderFinalGamma).flat(),
                                   weights.at(kEncoderFinalBeta).flat());

    const FrameTensor stats =
        linear_frames(out.hidden, weights.at(kEncoderProjWeight), weights.at(kEncoderProjBias).flat());
    const int dz = config.latent_dim;
    if (stats.dim(0) != 2 * dz) {
        throw std::invalid_argument("encode_text: prior projection produced " + shape_str(stats) +
                                    ", expected " + std::to_string(2 * dz) + " rows");
    }
    out.prior_mean = FrameTensor({dz, t});
    out.prior_logstd = FrameTensor({dz, t});
    for (int di = 0; di < dz; ++di) {
        for (int tt = 0; tt < t; ++tt) {
            out.prior_mean.at(di, tt) = stats.at(di, tt);
            out.prior_logstd.at(di, tt) = stats.at(dz + di, tt);
        }
    }
    return out;
}

}  // namespace flytts
