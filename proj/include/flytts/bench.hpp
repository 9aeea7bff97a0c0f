#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flytts/model.hpp"

namespace flytts {

// Upstream implementation's published CPU real-time factors (Intel Core
// i9-10920X), carried in reports as context for the measured numbers.
inline constexpr double kUpstreamRtfCpuVitsBase = 0.1221;
inline constexpr double kUpstreamRtfCpuFlyTts = 0.0139;

struct RtfReport {
    double audio_seconds = 0.0;
    double wall_mean_seconds = 0.0;
    double wall_median_seconds = 0.0;
    double rtf_mean = 0.0;
    double rtf_median = 0.0;
    int repeats = 0;
    int warmups = 0;
    StageSeconds stage_mean;            // averaged over timed runs
    std::vector<double> run_seconds;    // timed runs only
    std::int64_t samples = 0;
    int sample_rate = 0;
    std::string environment;
};

// Aggregates timed runs into a report; pure so the arithmetic is testable.
RtfReport summarize_runs(const std::vector<double>& wall_seconds, double audio_seconds, int warmups);

// Runs synthesize warmups+repeats times single-threaded on the monotonic
// clock, discards the warmups, reports mean and median RTF plus per-stage
// wall time.
RtfReport measure_rtf(const ModelConfig& config, const WeightStore& store, const TokenSeq& tokens,
                      int repeats, int warmups, float noise_scale = kDefaultNoiseScale,
                      float length_scale = kDefaultLengthScale, std::uint64_t seed = 0);

std::string format_report(const RtfReport& report);

}  // namespace flytts
