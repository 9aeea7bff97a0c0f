#include "flytts/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "flytts/weights.hpp"  // FormatError

namespace flytts {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

}  // namespace

std::vector<std::uint8_t> encode_wav_pcm16(std::span<const float> samples, int sample_rate) {
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);

    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");

    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate * 2));  // byte rate
    put_u16(out, 2);                                            // block align
    put_u16(out, 16);

    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (float s : samples) {
        const float clamped = std::clamp(s, -1.0f, 1.0f);
        const auto v = static_cast<std::int16_t>(std::lround(clamped * 32767.0f));
        put_u16(out, static_cast<std::uint16_t>(v));
    }
    return out;
}

void write_wav(const std::string& path, const Waveform& wave) {
    const auto bytes = encode_wav_pcm16(wave.samples, wave.sample_rate);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("short write to '" + path + "'");
}

WavInfo decode_wav_pcm16(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw FormatError("not a RIFF/WAVE file");
    }
    WavInfo info;
    size_t pos = 12;
    bool have_fmt = false;
    while (pos + 8 <= bytes.size()) {
        char tag[5] = {0};
        std::memcpy(tag, bytes.data() + pos, 4);
        const std::uint32_t size = get_u32(bytes, pos + 4);
        pos += 8;
        if (pos + size > bytes.size()) throw FormatError("WAV chunk '" + std::string(tag) + "' truncated");
        if (std::strcmp(tag, "fmt ") == 0) {
            if (size < 16) throw FormatError("WAV fmt chunk too small");
            if (get_u16(bytes, pos) != 1) throw FormatError("WAV is not integer PCM");
            info.channels = get_u16(bytes, pos + 2);
            info.sample_rate = static_cast<int>(get_u32(bytes, pos + 4));
            info.bits_per_sample = get_u16(bytes, pos + 14);
            have_fmt = true;
        } else if (std::strcmp(tag, "data") == 0) {
            if (!have_fmt) throw FormatError("WAV data chunk before fmt");
            if (info.bits_per_sample != 16) throw FormatError("WAV is not 16-bit");
            info.num_samples = size / 2;
            info.samples.resize(static_cast<size_t>(info.num_samples));
            for (std::int64_t i = 0; i < info.num_samples; ++i) {
                info.samples[static_cast<size_t>(i)] =
                    static_cast<std::int16_t>(get_u16(bytes, pos + 2 * static_cast<size_t>(i)));
            }
        }
        pos += size;
    }
    if (!have_fmt || info.num_samples < 0) throw FormatError("WAV missing fmt or data chunk");
    return info;
}

WavInfo read_wav_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw FormatError("cannot open WAV file '" + path + "'");
    const std::streamsize size = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) throw FormatError("short read from '" + path + "'");
    return decode_wav_pcm16(bytes);
}

}  // namespace flytts
