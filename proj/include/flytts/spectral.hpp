#pragma once

#include <complex>
#include <span>
#include <vector>

#include "flytts/tensor.hpp"

namespace flytts {

inline constexpr int kDefaultSampleRate = 22050;

struct Waveform {
    std::vector<float> samples;
    int sample_rate = kDefaultSampleRate;

    double seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// Magnitude/phase spectrogram, N = n_fft/2 + 1 bins by T frames.
struct SpectralFrames {
    FrameTensor magnitude;  // [N x T]
    FrameTensor phase;      // [N x T], radians, consumed through cos/sin

    int bins() const { return magnitude.dim(0); }
    int frames() const { return magnitude.dim(1); }
};

struct StftConfig {
    int n_fft = 1024;
    int hop = 256;
    std::vector<float> window;  // analysis window, length n_fft

    // Periodic Hann window; hop <= n_fft/2 keeps the squared-window
    // overlap-add envelope strictly positive on interior samples.
    static StftConfig hann(int n_fft, int hop);

    void validate() const;
};

// Radix-2 real FFT, n a power of two, forward unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> frame);

// Inverse of rfft; spec holds n/2+1 bins, output has n samples, scaled 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spec, int n);

// Center-mode analysis: reflect-pad n_fft/2 each side, Hann window, real FFT
// per frame. Frame count: floor(len/hop) + 1.
SpectralFrames stft(const Waveform& x, const StftConfig& cfg);

// Windowed overlap-add synthesis, normalized by the summed squared-window
// envelope (floored at 1e-11), trimmed n_fft/2 at both ends.
// Output length: (T - 1) * hop.
Waveform istft(const SpectralFrames& spec, const StftConfig& cfg,
               int sample_rate = kDefaultSampleRate);

}  // namespace flytts
