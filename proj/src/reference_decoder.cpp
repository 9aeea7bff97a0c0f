#include "flytts/reference_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flytts/nnkit.hpp"

namespace flytts {

ReferenceDecoderShape reference_decoder_shape() {
    return {};
}

FrameTensor conv_transpose1d(const FrameTensor& x, const FrameTensor& weight,
                             std::span<const float> bias, int stride, int padding) {
    if (x.rank() != 2 || weight.rank() != 3) {
        throw std::invalid_argument("conv_transpose1d: expected x [C_in x T] and weight [C_in x C_out x K]");
    }
    const int c_in = x.dim(0);
    const int t_in = x.dim(1);
    const int c_out = weight.dim(1);
    const int k = weight.dim(2);
    if (weight.dim(0) != c_in) {
        throw std::invalid_argument("conv_transpose1d: weight expects " + std::to_string(weight.dim(0)) +
                                    " input channels, input has " + std::to_string(c_in));
    }
    if (stride < 1 || padding < 0) {
        throw std::invalid_argument("conv_transpose1d: bad stride/padding");
    }
    const int t_out = (t_in - 1) * stride + k - 2 * padding;
    if (t_out < 1) {
        throw std::invalid_argument("conv_transpose1d: output would be empty");
    }

    FrameTensor y({c_out, t_out});
    std::vector<double> acc(static_cast<size_t>(t_out));
    for (int co = 0; co < c_out; ++co) {
        std::fill(acc.begin(), acc.end(), bias.empty() ? 0.0 : static_cast<double>(bias[static_cast<size_t>(co)]));
        for (int ci = 0; ci < c_in; ++ci) {
            const float* xr = x.data.data() + static_cast<size_t>(ci) * t_in;
            const float* wr = weight.data.data() + (static_cast<size_t>(ci) * c_out + co) * k;
            for (int ti = 0; ti < t_in; ++ti) {
                const double xv = xr[ti];
                if (xv == 0.0) continue;
                const int base = ti * stride - padding;
                const int k0 = std::max(0, -base);
                const int k1 = std::min(k, t_out - base);
                double* a = acc.data() + base;
                for (int kk = k0; kk < k1; ++kk) {
                    a[kk] += xv * static_cast<double>(wr[kk]);
                }
            }
        }
        float* yr = y.data.data() + static_cast<size_t>(co) * t_out;
        for (int t = 0; t < t_out; ++t) yr[t] = static_cast<float>(acc[static_cast<size_t>(t)]);
    }
    return y;
}

namespace {

// HiFi-GAN-style residual block: pairs of (dilated, plain) kernel-k
// convolutions with Leaky ReLU, each pair added back to the input.
FrameTensor residual_block(const FrameTensor& x, const WeightStore& w, const std::string& prefix,
                           int kernel, std::span<const int> dilations) {
    FrameTensor h = x;
    for (size_t p = 0; p < dilations.size(); ++p) {
        const int d = dilations[p];
        const std::string tag = prefix + ".pair" + std::to_string(p);

        FrameTensor t = h;
        leaky_relu_inplace(t);
        t = conv1d(t, w.at(tag + ".c1.weight"), w.at(tag + ".c1.bias").flat(), d * (kernel - 1) / 2, d);
        leaky_relu_inplace(t);
        t = conv1d(t, w.at(tag + ".c2.weight"), w.at(tag + ".c2.bias").flat(), (kernel - 1) / 2);
        for (size_t i = 0; i < h.data.size(); ++i) h.data[i] += t.data[i];
    }
    return h;
}

}  // namespace

Waveform reference_decode(const FrameTensor& z, const WeightStore& weights, const ModelConfig& config) {
    if (z.rank() != 2 || z.dim(0) != config.latent_dim) {
        throw std::invalid_argument("reference_decode: latent must be [D_z x T], got " + shape_str(z));
    }
    if (!weights.has("ref.conv_pre.weight")) {
        throw std::invalid_argument("reference_decode: store carries no reference decoder weights");
    }
    const ReferenceDecoderShape shape = reference_decoder_shape();
    const int t_in = z.dim(1);

    FrameTensor h = conv1d(z, weights.at("ref.conv_pre.weight"), weights.at("ref.conv_pre.bias").flat(), 3);

    for (int level = 0; level < 4; ++level) {
        const std::string up = "ref.up" + std::to_string(level);
        leaky_relu_inplace(h);
        const int rate = shape.upsample_rates[static_cast<size_t>(level)];
        const int kernel = shape.upsample_kernels[static_cast<size_t>(level)];
        h = conv_transpose1d(h, weights.at(up + ".weight"), weights.at(up + ".bias").flat(), rate,
                             (kernel - rate) / 2);

        FrameTensor sum({h.dim(0), h.dim(1)});
        for (size_t j = 0; j < shape.resblock_kernels.size(); ++j) {
            const FrameTensor r =
                residual_block(h, weights, up + ".res" + std::to_string(j),
                               shape.resblock_kernels[j], shape.resblock_dilations);
            for (size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += r.data[i];
        }
        const float inv = 1.0f / static_cast<float>(shape.resblock_kernels.size());
        for (float& v : sum.data) v *= inv;
        h = std::move(sum);
    }

    leaky_relu_inplace(h);
    h = conv1d(h, weights.at("ref.conv_post.weight"), weights.at("ref.conv_post.bias").flat(), 3);

    Waveform y;
    y.sample_rate = config.sample_rate;
    y.samples.resize(static_cast<size_t>(h.dim(1)));
    for (int i = 0; i < h.dim(1); ++i) {
        y.samples[static_cast<size_t>(i)] = static_cast<float>(std::tanh(static_cast<double>(h.at(0, i))));
    }

    const size_t expected = static_cast<size_t>(t_in) * shape.total_upsample();
    if (y.samples.size() != expected) {
        throw std::logic_error("reference_decode: produced " + std::to_string(y.samples.size()) +
                               " samples, expected " + std::to_string(expected));
    }
    return y;
}

}  // namespace flytts
