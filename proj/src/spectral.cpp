#include "flytts/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flytts {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEnvelopeFloor = 1e-11;

bool is_power_of_two(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

// Iterative radix-2 Cooley-Tukey, in place.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    if (n <= 1) return;

    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Mirror index into [0, n) with reflection at both ends (no edge repeat).
int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

}  // namespace

StftConfig StftConfig::hann(int n_fft, int hop) {
    StftConfig cfg;
    cfg.n_fft = n_fft;
    cfg.hop = hop;
    cfg.window.resize(static_cast<size_t>(n_fft));
    for (int i = 0; i < n_fft; ++i) {
        cfg.window[static_cast<size_t>(i)] =
            static_cast<float>(0.5 * (1.0 - std::cos(2.0 * kPi * i / n_fft)));
    }
    cfg.validate();
    return cfg;
}

void StftConfig::validate() const {
    if (!is_power_of_two(n_fft)) {
        throw std::invalid_argument("StftConfig: n_fft must be a power of two, got " + std::to_string(n_fft));
    }
    if (hop <= 0 || hop > n_fft / 2) {
        throw std::invalid_argument("StftConfig: hop must satisfy 0 < hop <= n_fft/2");
    }
    if (static_cast<int>(window.size()) != n_fft) {
        throw std::invalid_argument("StftConfig: window length must equal n_fft");
    }
}

std::vector<std::complex<double>> rfft(std::span<const double> frame) {
    const int n = static_cast<int>(frame.size());
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("rfft: frame length must be a power of two, got " + std::to_string(n));
    }
    std::vector<std::complex<double>> a(frame.begin(), frame.end());
    fft_inplace(a, /*inverse=*/false);
    a.resize(static_cast<size_t>(n / 2 + 1));
    return a;
}

std::vector<double> irfft(std::span<const std::complex<double>> spec, int n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("irfft: n must be a power of two, got " + std::to_string(n));
    }
    if (static_cast<int>(spec.size()) != n / 2 + 1) {
        throw std::invalid_argument("irfft: expected " + std::to_string(n / 2 + 1) + " bins, got " +
                                    std::to_string(spec.size()));
    }
    // Expand Hermitian half-spectrum to full length.
    std::vector<std::complex<double>> a(static_cast<size_t>(n));
    for (int k = 0; k <= n / 2; ++k) a[static_cast<size_t>(k)] = spec[static_cast<size_t>(k)];
    for (int k = n / 2 + 1; k < n; ++k) a[static_cast<size_t>(k)] = std::conj(spec[static_cast<size_t>(n - k)]);
    fft_inplace(a, /*inverse=*/true);
    std::vector<double> out(static_cast<size_t>(n));
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a[static_cast<size_t>(i)].real() * inv_n;
    return out;
}

SpectralFrames stft(const Waveform& x, const StftConfig& cfg) {
    cfg.validate();
    const int len = static_cast<int>(x.samples.size());
    if (len < 1) throw std::invalid_argument("stft: empty input");

    const int pad = cfg.n_fft / 2;
    const int frames = len / cfg.hop + 1;
    const int bins = cfg.n_fft / 2 + 1;

    SpectralFrames out;
    out.magnitude = FrameTensor({bins, frames});
    out.phase = FrameTensor({bins, frames});

    std::vector<double> frame(static_cast<size_t>(cfg.n_fft));
    for (int t = 0; t < frames; ++t) {
        const int start = t * cfg.hop - pad;
        for (int i = 0; i < cfg.n_fft; ++i) {
            const int src = reflect_index(start + i, len);
            frame[static_cast<size_t>(i)] =
                static_cast<double>(x.samples[static_cast<size_t>(src)]) * cfg.window[static_cast<size_t>(i)];
        }
        const auto bins_c = rfft(frame);
        for (int k = 0; k < bins; ++k) {
            const auto& c = bins_c[static_cast<size_t>(k)];
            out.magnitude.at(k, t) = static_cast<float>(std::abs(c));
            out.phase.at(k, t) = static_cast<float>(std::atan2(c.imag(), c.real()));
        }
    }
    return out;
}

Waveform istft(const SpectralFrames& spec, const StftConfig& cfg, int sample_rate) {
    cfg.validate();
    const int bins = cfg.n_fft / 2 + 1;
    if (spec.magnitude.rank() != 2 || spec.phase.rank() != 2 ||
        !spec.magnitude.same_shape(spec.phase)) {
        throw std::invalid_argument("istft: magnitude and phase must be matching [N x T] tensors");
    }
    if (spec.bins() != bins) {
        throw std::invalid_argument("istft: expected " + std::to_string(bins) + " bins for n_fft=" +
                                    std::to_string(cfg.n_fft) + ", got " + std::to_string(spec.bins()));
    }
    const int frames = spec.frames();
    const int pad = cfg.n_fft / 2;
    const int total = (frames - 1) * cfg.hop + cfg.n_fft;
    const int out_len = (frames - 1) * cfg.hop;

    std::vector<double> ola(static_cast<size_t>(total), 0.0);
    std::vector<double> envelope(static_cast<size_t>(total), 0.0);
    std::vector<std::complex<double>> coeffs(static_cast<size_t>(bins));

    for (int t = 0; t < frames; ++t) {
        for (int k = 0; k < bins; ++k) {
            const double m = spec.magnitude.at(k, t);
            const double p = spec.phase.at(k, t);
            coeffs[static_cast<size_t>(k)] = {m * std::cos(p), m * std::sin(p)};
        }
        const auto frame = irfft(coeffs, cfg.n_fft);
        const int base = t * cfg.hop;
        for (int i = 0; i < cfg.n_fft; ++i) {
            const double w = cfg.window[static_cast<size_t>(i)];
            ola[static_cast<size_t>(base + i)] += frame[static_cast<size_t>(i)] * w;
            envelope[static_cast<size_t>(base + i)] += w * w;
        }
    }

    Waveform y;
    y.sample_rate = sample_rate;
    y.samples.resize(static_cast<size_t>(std::max(out_len, 0)));
    for (int i = 0; i < out_len; ++i) {
        const double env = std::max(envelope[static_cast<size_t>(i + pad)], kEnvelopeFloor);
        y.samples[static_cast<size_t>(i)] = static_cast<float>(ola[static_cast<size_t>(i + pad)] / env);
    }
    return y;
}

}  // namespace flytts
