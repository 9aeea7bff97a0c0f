#include "flytts/bench.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

namespace flytts {

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string environment_string() {
    std::ostringstream os;
    os << "single-threaded, steady_clock";
#if defined(__VERSION__)
    os << ", compiler " << __VERSION__;
#endif
#if defined(NDEBUG)
    os << ", optimized build";
#else
    os << ", debug build";
#endif
    return os.str();
}

}  // namespace

RtfReport summarize_runs(const std::vector<double>& wall_seconds, double audio_seconds, int warmups) {
    if (wall_seconds.empty()) {
        throw std::invalid_argument("summarize_runs: need at least one timed run");
    }
    if (!(audio_seconds > 0.0)) {
        throw std::invalid_argument("summarize_runs: audio duration must be positive");
    }
    RtfReport r;
    r.audio_seconds = audio_seconds;
    r.repeats = static_cast<int>(wall_seconds.size());
    r.warmups = warmups;
    r.run_seconds = wall_seconds;
    double sum = 0.0;
    for (double w : wall_seconds) sum += w;
    r.wall_mean_seconds = sum / static_cast<double>(wall_seconds.size());
    r.wall_median_seconds = median_of(wall_seconds);
    r.rtf_mean = r.wall_mean_seconds / audio_seconds;
    r.rtf_median = r.wall_median_seconds / audio_seconds;
    r.environment = environment_string();
    return r;
}

RtfReport measure_rtf(const ModelConfig& config, const WeightStore& store, const TokenSeq& tokens,
                      int repeats, int warmups, float noise_scale, float length_scale,
                      std::uint64_t seed) {
    if (repeats < 1) throw std::invalid_argument("measure_rtf: repeats must be >= 1");
    if (warmups < 0) throw std::invalid_argument("measure_rtf: warmups must be >= 0");

    for (int i = 0; i < warmups; ++i) {
        synthesize(tokens, store, config, noise_scale, length_scale, seed);
    }

    std::vector<double> walls;
    walls.reserve(static_cast<size_t>(repeats));
    StageSeconds stage_sum;
    Waveform last;
    for (int i = 0; i < repeats; ++i) {
        StageSeconds stages;
        const auto t0 = std::chrono::steady_clock::now();
        last = synthesize_traced(tokens, store, config, noise_scale, length_scale, seed, &stages);
        walls.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        stage_sum.encoder += stages.encoder;
        stage_sum.flow += stages.flow;
        stage_sum.decoder += stages.decoder;
        stage_sum.istft += stages.istft;
    }

    if (last.samples.empty()) {
        throw std::invalid_argument("measure_rtf: synthesis produced no audio");
    }

    RtfReport r = summarize_runs(walls, last.seconds(), warmups);
    r.samples = static_cast<std::int64_t>(last.samples.size());
    r.sample_rate = last.sample_rate;
    const double inv = 1.0 / static_cast<double>(repeats);
    r.stage_mean.encoder = stage_sum.encoder * inv;
    r.stage_mean.flow = stage_sum.flow * inv;
    r.stage_mean.decoder = stage_sum.decoder * inv;
    r.stage_mean.istft = stage_sum.istft * inv;
    return r;
}

std::string format_report(const RtfReport& report) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << "audio_seconds " << report.audio_seconds << " (" << report.samples << " samples @ "
       << report.sample_rate << " Hz)\n";
    os << "runs " << report.repeats << " timed, " << report.warmups << " warmup\n";
    os << "wall_mean_seconds " << report.wall_mean_seconds << "\n";
    os << "wall_median_seconds " << report.wall_median_seconds << "\n";
    os << "rtf_mean " << report.rtf_mean << "\n";
    os << "rtf_median " << report.rtf_median << "\n";
    os << "stage_seconds encoder " << report.stage_mean.encoder << " flow " << report.stage_mean.flow
       << " decoder " << report.stage_mean.decoder << " istft " << report.stage_mean.istft << "\n";
    os.precision(4);
    os << "upstream_rtf_cpu vits-base " << kUpstreamRtfCpuVitsBase << " fly-tts " << kUpstreamRtfCpuFlyTts
       << "\n";
    os << "environment " << report.environment << "\n";
    return os.str();
}

}  // namespace flytts
