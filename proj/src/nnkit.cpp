#include "flytts/nnkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace flytts {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double bias_at(std::span<const float> bias, int c) {
    return bias.empty() ? 0.0 : static_cast<double>(bias[static_cast<size_t>(c)]);
}

// Interior stencil with a compile-time tap count; the kk loop unrolls and the
// t loop vectorizes as shifted loads.
template <int K>
void add_taps_fixed(double* acc, const float* xr, const float* wr, int dilation, int padding,
                    int t_lo, int t_hi) {
    for (int t = t_lo; t < t_hi; ++t) {
        double s = 0.0;
        for (int kk = 0; kk < K; ++kk) {
            s += static_cast<double>(wr[kk]) * static_cast<double>(xr[t - padding + kk * dilation]);
        }
        acc[t] += s;
    }
}

void add_taps_generic(double* acc, const float* xr, const float* wr, int k, int dilation, int padding,
                      int t_lo, int t_hi) {
    for (int t = t_lo; t < t_hi; ++t) {
        double s = 0.0;
        for (int kk = 0; kk < k; ++kk) {
            s += static_cast<double>(wr[kk]) * static_cast<double>(xr[t - padding + kk * dilation]);
        }
        acc[t] += s;
    }
}

// Accumulates one (out-channel, in-channel) weight row into acc[0..t_out).
// Boundary frames are guarded per tap, interior frames run the unrolled
// stencil. Tap order (kk inner) matches the direct-summation definition.
void add_taps_edge(double* acc, const float* xr, const float* wr, int k, int dilation, int padding,
                   int t_in, int t0, int t1) {
    for (int t = t0; t < t1; ++t) {
        const int base = t - padding;
        int k0 = 0;
        if (base < 0) k0 = (-base + dilation - 1) / dilation;
        int k1 = k;
        if (base + (k - 1) * dilation >= t_in) {
            k1 = base >= t_in ? 0 : (t_in - base + dilation - 1) / dilation;
        }
        double s = 0.0;
        for (int kk = k0; kk < k1; ++kk) {
            s += static_cast<double>(wr[kk]) * static_cast<double>(xr[base + kk * dilation]);
        }
        acc[t] += s;
    }
}

void add_taps(double* acc, const float* xr, const float* wr, int k, int dilation, int padding,
              int t_in, int t_out) {
    int t_lo = std::min(padding, t_out);
    int t_hi = std::min(t_out, t_in - (k - 1) * dilation + padding);
    if (t_hi < t_lo) t_hi = t_lo;

    add_taps_edge(acc, xr, wr, k, dilation, padding, t_in, 0, t_lo);
    switch (k) {
        case 1: add_taps_fixed<1>(acc, xr, wr, dilation, padding, t_lo, t_hi); break;
        case 3: add_taps_fixed<3>(acc, xr, wr, dilation, padding, t_lo, t_hi); break;
        case 5: add_taps_fixed<5>(acc, xr, wr, dilation, padding, t_lo, t_hi); break;
        case 7: add_taps_fixed<7>(acc, xr, wr, dilation, padding, t_lo, t_hi); break;
        case 11: add_taps_fixed<11>(acc, xr, wr, dilation, padding, t_lo, t_hi); break;
        case 16: add_taps_fixed<16>(acc, xr, wr, dilation, padding, t_lo, t_hi); break;
        default: add_taps_generic(acc, xr, wr, k, dilation, padding, t_lo, t_hi); break;
    }
    add_taps_edge(acc, xr, wr, k, dilation, padding, t_in, t_hi, t_out);
}

}  // namespace

FrameTensor conv1d(const FrameTensor& x, const FrameTensor& weight,
                   std::span<const float> bias, int padding, int dilation) {
    require(x.rank() == 2, "conv1d: input must be [C_in x T], got " + shape_str(x));
    require(weight.rank() == 3, "conv1d: weight must be [C_out x C_in x K], got " + shape_str(weight));
    const int c_in = x.dim(0);
    const int t_in = x.dim(1);
    const int c_out = weight.dim(0);
    const int k = weight.dim(2);
    require(weight.dim(1) == c_in,
            "conv1d: weight expects " + std::to_string(weight.dim(1)) + " input channels, input has " +
                std::to_string(c_in) + " (weight " + shape_str(weight) + ", input " + shape_str(x) + ")");
    require(k >= 1, "conv1d: kernel size must be >= 1");
    require(padding >= 0, "conv1d: padding must be >= 0");
    require(dilation >= 1, "conv1d: dilation must be >= 1");
    require(bias.empty() || static_cast<int>(bias.size()) == c_out, "conv1d: bias length mismatch");

    const int t_out = t_in + 2 * padding - dilation * (k - 1);
    require(t_out >= 1, "conv1d: output would be empty (T=" + std::to_string(t_in) +
                            ", padding=" + std::to_string(padding) + ", dilation=" + std::to_string(dilation) +
                            ", K=" + std::to_string(k) + ")");

    FrameTensor y({c_out, t_out});
    std::vector<double> acc(static_cast<size_t>(t_out));
    for (int co = 0; co < c_out; ++co) {
        std::fill(acc.begin(), acc.end(), bias_at(bias, co));
        for (int ci = 0; ci < c_in; ++ci) {
            const float* xr = x.data.data() + static_cast<size_t>(ci) * t_in;
            const float* wr = weight.data.data() + (static_cast<size_t>(co) * c_in + ci) * k;
            add_taps(acc.data(), xr, wr, k, dilation, padding, t_in, t_out);
        }
        float* yr = y.data.data() + static_cast<size_t>(co) * t_out;
        for (int t = 0; t < t_out; ++t) yr[t] = static_cast<float>(acc[static_cast<size_t>(t)]);
    }
    return y;
}

FrameTensor depthwise_conv1d(const FrameTensor& x, const FrameTensor& weight,
                             std::span<const float> bias, int padding) {
    require(x.rank() == 2, "depthwise_conv1d: input must be [C x T], got " + shape_str(x));
    require(weight.rank() == 2, "depthwise_conv1d: weight must be [C x K], got " + shape_str(weight));
    const int c = x.dim(0);
    const int t_in = x.dim(1);
    const int k = weight.dim(1);
    require(weight.dim(0) == c, "depthwise_conv1d: channel count mismatch (weight " + shape_str(weight) +
                                    ", input " + shape_str(x) + ")");
    require(padding >= 0, "depthwise_conv1d: padding must be >= 0");
    require(bias.empty() || static_cast<int>(bias.size()) == c, "depthwise_conv1d: bias length mismatch");

    const int t_out = t_in + 2 * padding - (k - 1);
    require(t_out >= 1, "depthwise_conv1d: output would be empty");

    FrameTensor y({c, t_out});
    std::vector<double> acc(static_cast<size_t>(t_out));
    for (int ci = 0; ci < c; ++ci) {
        std::fill(acc.begin(), acc.end(), bias_at(bias, ci));
        const float* xr = x.data.data() + static_cast<size_t>(ci) * t_in;
        const float* wr = weight.data.data() + static_cast<size_t>(ci) * k;
        add_taps(acc.data(), xr, wr, k, /*dilation=*/1, padding, t_in, t_out);
        float* yr = y.data.data() + static_cast<size_t>(ci) * t_out;
        for (int t = 0; t < t_out; ++t) yr[t] = static_cast<float>(acc[static_cast<size_t>(t)]);
    }
    return y;
}

FrameTensor linear_frames(const FrameTensor& x, const FrameTensor& weight,
                          std::span<const float> bias) {
    require(x.rank() == 2, "linear_frames: input must be [In x T], got " + shape_str(x));
    require(weight.rank() == 2, "linear_frames: weight must be [Out x In], got " + shape_str(weight));
    const int in = x.dim(0);
    const int t = x.dim(1);
    const int out = weight.dim(0);
    require(weight.dim(1) == in, "linear_frames: weight expects " + std::to_string(weight.dim(1)) +
                                     " inputs, input has " + std::to_string(in));
    require(bias.empty() || static_cast<int>(bias.size()) == out, "linear_frames: bias length mismatch");

    FrameTensor y({out, t});

    if (t < 32) {
        // Short sequences: per-element dot products over the input channels,
        // four independent partial sums to break the add latency chain.
        for (int o = 0; o < out; ++o) {
            const float* wr = weight.data.data() + static_cast<size_t>(o) * in;
            float* yr = y.data.data() + static_cast<size_t>(o) * t;
            for (int tt = 0; tt < t; ++tt) {
                const float* xp = x.data.data() + tt;
                double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
                int i = 0;
                for (; i + 4 <= in; i += 4) {
                    a0 += static_cast<double>(wr[i]) * static_cast<double>(xp[static_cast<size_t>(i) * t]);
                    a1 += static_cast<double>(wr[i + 1]) *
                          static_cast<double>(xp[static_cast<size_t>(i + 1) * t]);
                    a2 += static_cast<double>(wr[i + 2]) *
                          static_cast<double>(xp[static_cast<size_t>(i + 2) * t]);
                    a3 += static_cast<double>(wr[i + 3]) *
                          static_cast<double>(xp[static_cast<size_t>(i + 3) * t]);
                }
                for (; i < in; ++i) {
                    a0 += static_cast<double>(wr[i]) * static_cast<double>(xp[static_cast<size_t>(i) * t]);
                }
                yr[tt] = static_cast<float>(bias_at(bias, o) + (a0 + a1) + (a2 + a3));
            }
        }
        return y;
    }

    std::vector<double> acc(static_cast<size_t>(t));
    for (int o = 0; o < out; ++o) {
        std::fill(acc.begin(), acc.end(), bias_at(bias, o));
        const float* wr = weight.data.data() + static_cast<size_t>(o) * in;
        for (int i = 0; i < in; ++i) {
            const double wv = wr[i];
            if (wv == 0.0) continue;
            const float* xr = x.data.data() + static_cast<size_t>(i) * t;
            double* a = acc.data();
            for (int tt = 0; tt < t; ++tt) {
                a[tt] += wv * static_cast<double>(xr[tt]);
            }
        }
        float* yr = y.data.data() + static_cast<size_t>(o) * t;
        for (int tt = 0; tt < t; ++tt) yr[tt] = static_cast<float>(acc[static_cast<size_t>(tt)]);
    }
    return y;
}

std::vector<float> layer_norm(std::span<const float> x, std::span<const float> gamma,
                              std::span<const float> beta, float eps) {
    const size_t c = x.size();
    require(c >= 1, "layer_norm: empty input");
    require(gamma.size() == c && beta.size() == c, "layer_norm: gamma/beta length mismatch");
    require(eps > 0.0f, "layer_norm: eps must be > 0");

    double mean = 0.0;
    for (float v : x) mean += v;
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (float v : x) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(c);
    const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));

    std::vector<float> out(c);
    for (size_t i = 0; i < c; ++i) {
        out[i] = static_cast<float>((x[i] - mean) * inv * gamma[i] + beta[i]);
    }
    return out;
}

FrameTensor layer_norm_frames(const FrameTensor& x, std::span<const float> gamma,
                              std::span<const float> beta, float eps) {
    require(x.rank() == 2, "layer_norm_frames: input must be [C x T], got " + shape_str(x));
    const int c = x.dim(0);
    const int t = x.dim(1);
    require(static_cast<int>(gamma.size()) == c && static_cast<int>(beta.size()) == c,
            "layer_norm_frames: gamma/beta length mismatch");
    require(eps > 0.0f, "layer_norm_frames: eps must be > 0");

    FrameTensor y({c, t});
    for (int tt = 0; tt < t; ++tt) {
        double mean = 0.0;
        for (int ci = 0; ci < c; ++ci) mean += x.at(ci, tt);
        mean /= c;
        double var = 0.0;
        for (int ci = 0; ci < c; ++ci) {
            const double d = x.at(ci, tt) - mean;
            var += d * d;
        }
        var /= c;
        const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));
        for (int ci = 0; ci < c; ++ci) {
            y.at(ci, tt) = static_cast<float>((x.at(ci, tt) - mean) * inv * gamma[static_cast<size_t>(ci)] +
                                              beta[static_cast<size_t>(ci)]);
        }
    }
    return y;
}

float gelu(float x) {
    const double xd = x;
    return static_cast<float>(xd * 0.5 * (1.0 + std::erf(xd / 1.41421356237309504880)));
}

void gelu_inplace(FrameTensor& t) {
    for (float& v : t.data) v = gelu(v);
}

float leaky_relu(float x, float slope) {
    return x >= 0.0f ? x : slope * x;
}

void leaky_relu_inplace(FrameTensor& t, float slope) {
    for (float& v : t.data) v = leaky_relu(v, slope);
}

FrameTensor multi_head_attention(const FrameTensor& x, const AttentionWeights& w,
                                 int heads, const std::vector<std::uint8_t>* mask) {
    require(x.rank() == 2, "multi_head_attention: input must be [D x T], got " + shape_str(x));
    const int d = x.dim(0);
    const int t = x.dim(1);
    require(heads >= 1 && d % heads == 0, "multi_head_attention: D must be divisible by heads");
    require(w.wq && w.wk && w.wv && w.wo, "multi_head_attention: missing projection weights");
    require(mask == nullptr || static_cast<int>(mask->size()) == t * t,
            "multi_head_attention: mask must be T x T");

    auto bias_span = [](const FrameTensor* b) {
        return b ? std::span<const float>(b->data) : std::span<const float>();
    };
    const FrameTensor q = linear_frames(x, *w.wq, bias_span(w.bq));
    const FrameTensor k = linear_frames(x, *w.wk, bias_span(w.bk));
    const FrameTensor v = linear_frames(x, *w.wv, bias_span(w.bv));

    const int dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    FrameTensor ctx({d, t});
    std::vector<double> logits(static_cast<size_t>(t));
    std::vector<double> probs(static_cast<size_t>(t));
    for (int h = 0; h < heads; ++h) {
        const int r0 = h * dh;
        for (int tq = 0; tq < t; ++tq) {
            double max_logit = -std::numeric_limits<double>::infinity();
            int visible = 0;
            for (int tk = 0; tk < t; ++tk) {
                if (mask && !(*mask)[static_cast<size_t>(tq) * t + tk]) {
                    logits[static_cast<size_t>(tk)] = -std::numeric_limits<double>::infinity();
                    continue;
                }
                double dot = 0.0;
                for (int di = 0; di < dh; ++di) {
                    dot += static_cast<double>(q.at(r0 + di, tq)) * static_cast<double>(k.at(r0 + di, tk));
                }
                const double l = dot * scale;
                logits[static_cast<size_t>(tk)] = l;
                max_logit = std::max(max_logit, l);
                ++visible;
            }
            require(visible >= 1, "multi_head_attention: fully masked query row " + std::to_string(tq));

            double denom = 0.0;
            for (int tk = 0; tk < t; ++tk) {
                const double l = logits[static_cast<size_t>(tk)];
                const double p = std::isinf(l) ? 0.0 : std::exp(l - max_logit);
                probs[static_cast<size_t>(tk)] = p;
                denom += p;
            }
            for (int di = 0; di < dh; ++di) {
                double acc = 0.0;
                for (int tk = 0; tk < t; ++tk) {
                    acc += probs[static_cast<size_t>(tk)] * static_cast<double>(v.at(r0 + di, tk));
                }
                ctx.at(r0 + di, tq) = static_cast<float>(acc / denom);
            }
        }
    }
    return linear_frames(ctx, *w.wo, bias_span(w.bo));
}

}  // namespace flytts
