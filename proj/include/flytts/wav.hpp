#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flytts/spectral.hpp"

namespace flytts {

// 16-bit PCM mono RIFF/WAVE with clamp-and-round float conversion.
std::vector<std::uint8_t> encode_wav_pcm16(std::span<const float> samples, int sample_rate);
void write_wav(const std::string& path, const Waveform& wave);

struct WavInfo {
    int sample_rate = 0;
    int channels = 0;
    int bits_per_sample = 0;
    std::int64_t num_samples = 0;
    std::vector<std::int16_t> samples;
};

WavInfo decode_wav_pcm16(std::span<const std::uint8_t> bytes);
WavInfo read_wav_file(const std::string& path);

}  // namespace flytts
