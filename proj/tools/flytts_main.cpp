// flytts CLI: weight initialization, synthesis, parameter accounting,
// RTF benchmarking and analytic MAC estimates.

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "flytts/bench.hpp"
#include "flytts/decoder.hpp"
#include "flytts/duration.hpp"
#include "flytts/flow.hpp"
#include "flytts/macs.hpp"
#include "flytts/model.hpp"
#include "flytts/reference_decoder.hpp"
#include "flytts/wav.hpp"
#include "flytts/weights.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

const std::vector<std::string> kPresets = {"fly-tts", "mini-fly-tts", "vits-base-shaped"};

struct SynthArgs {
    std::string weights_path;
    std::string preset = "fly-tts";
    std::string tokens_path;
    std::string text;
    std::string out_path = "out.wav";
    float noise_scale = flytts::kDefaultNoiseScale;
    float length_scale = flytts::kDefaultLengthScale;
    std::uint64_t seed = 0;
};

flytts::TokenSeq resolve_tokens(const std::string& tokens_path, const std::string& text) {
    if (!tokens_path.empty()) return flytts::tokens_from_file(tokens_path);
    return flytts::tokens_from_text(text);
}

nlohmann::json report_to_json(const flytts::RtfReport& r) {
    nlohmann::json j;
    j["audio_seconds"] = r.audio_seconds;
    j["samples"] = r.samples;
    j["sample_rate"] = r.sample_rate;
    j["repeats"] = r.repeats;
    j["warmups"] = r.warmups;
    j["wall_mean_seconds"] = r.wall_mean_seconds;
    j["wall_median_seconds"] = r.wall_median_seconds;
    j["rtf_mean"] = r.rtf_mean;
    j["rtf_median"] = r.rtf_median;
    j["run_seconds"] = r.run_seconds;
    j["stage_seconds"] = {{"encoder", r.stage_mean.encoder},
                          {"flow", r.stage_mean.flow},
                          {"decoder", r.stage_mean.decoder},
                          {"istft", r.stage_mean.istft}};
    j["upstream_rtf_cpu"] = {{"vits-base", flytts::kUpstreamRtfCpuVitsBase},
                             {"fly-tts", flytts::kUpstreamRtfCpuFlyTts}};
    j["environment"] = r.environment;
    return j;
}

int run_init(const std::string& preset, std::uint64_t seed, const std::string& out_path) {
    const flytts::ModelConfig cfg = flytts::preset_config(preset);
    const flytts::WeightStore store = flytts::init_weights(cfg, seed);
    flytts::save_weights_file(store, out_path);
    std::cout << "wrote " << out_path << " (" << store.parameter_count() << " parameters, preset "
              << preset << ", seed " << seed << ")\n";
    return kExitOk;
}

int run_synth(const SynthArgs& args) {
    const flytts::ModelConfig cfg = flytts::preset_config(args.preset);
    const flytts::WeightStore store = flytts::load_weights_file(args.weights_path);
    const flytts::TokenSeq tokens = resolve_tokens(args.tokens_path, args.text);

    const flytts::Waveform wave = flytts::synthesize(tokens, store, cfg, args.noise_scale,
                                                     args.length_scale, args.seed);
    flytts::write_wav(args.out_path, wave);
    std::cout << "wrote " << args.out_path << ": " << wave.samples.size() << " samples, "
              << wave.seconds() << " s @ " << wave.sample_rate << " Hz (" << tokens.length()
              << " tokens)\n";
    return kExitOk;
}

int run_params(const std::string& weights_path, bool breakdown) {
    const flytts::WeightStore store = flytts::load_weights_file(weights_path);
    if (breakdown) {
        for (const auto& [module, count] : store.parameter_count_by_module()) {
            std::cout << module << " " << count << "\n";
        }
    }
    std::cout << "total " << store.parameter_count() << "\n";
    return kExitOk;
}

int run_bench(const std::string& weights_path, const std::string& preset,
              const std::string& tokens_path, int repeats, int warmups, bool compare_reference,
              const std::string& json_path) {
    const flytts::ModelConfig cfg = flytts::preset_config(preset);
    const flytts::WeightStore store = flytts::load_weights_file(weights_path);
    const flytts::TokenSeq tokens = flytts::tokens_from_file(tokens_path);

    const flytts::RtfReport report = flytts::measure_rtf(cfg, store, tokens, repeats, warmups);
    std::cout << format_report(report);

    nlohmann::json j = report_to_json(report);
    j["preset"] = preset;

    if (compare_reference) {
        if (cfg.decoder_kind == flytts::DecoderKind::kTransposedConv) {
            std::cout << "compare-reference: preset already uses the transposed-conv decoder\n";
        } else {
            // Rebuild the latent path once, then time both decoders on it.
            const flytts::SharingPlan plan{cfg.g1, cfg.m1};
            const flytts::EncodedText enc = flytts::encode_text(tokens, store, plan, cfg);
            const auto logd = flytts::predict_log_durations(enc.hidden, store, cfg);
            const auto durations = flytts::durations_to_frames(logd, flytts::kDefaultLengthScale);
            auto [mean, logstd] = flytts::regulate(enc.prior_mean, enc.prior_logstd, durations);
            const flytts::FlowPlan flow_plan{cfg.g2, cfg.m2};
            const flytts::FrameTensor z =
                flytts::flow_apply(mean, flow_plan, store, cfg, flytts::FlowDirection::kInverse);

            flytts::WeightStore ref_store;
            flytts::init_reference_decoder_weights(ref_store, cfg, 0x5e11c0de);

            const auto t0 = std::chrono::steady_clock::now();
            const flytts::Waveform own = flytts::decode(z, store, cfg);
            const auto t1 = std::chrono::steady_clock::now();
            const flytts::Waveform ref = flytts::reference_decode(z, ref_store, cfg);
            const auto t2 = std::chrono::steady_clock::now();

            const double own_s = std::chrono::duration<double>(t1 - t0).count();
            const double ref_s = std::chrono::duration<double>(t2 - t1).count();
            std::cout.setf(std::ios::fixed);
            std::cout.precision(6);
            std::cout << "decoder_seconds " << own_s << " (" << own.samples.size() << " samples)\n";
            std::cout << "reference_decoder_seconds " << ref_s << " (" << ref.samples.size()
                      << " samples)\n";
            std::cout << "decoder_speedup " << (own_s > 0 ? ref_s / own_s : 0.0) << "x\n";
            j["reference_compare"] = {{"decoder_seconds", own_s},
                                      {"reference_decoder_seconds", ref_s},
                                      {"speedup", own_s > 0 ? ref_s / own_s : 0.0}};
        }
    }

    if (!json_path.empty()) {
        if (json_path == "-") {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream f(json_path);
            if (!f) throw flytts::FormatError("cannot open '" + json_path + "' for writing");
            f << j.dump(2) << "\n";
        }
    }
    return kExitOk;
}

int run_macs(const std::string& preset, int frames) {
    const flytts::ModelConfig cfg = flytts::preset_config(preset);
    const flytts::MacsReport r = flytts::estimate_macs(cfg, frames);
    std::cout << "frames " << r.frames << "\n";
    std::cout << "encoder " << r.encoder << "\n";
    std::cout << "flow " << r.flow << "\n";
    std::cout << "decoder " << r.decoder << "\n";
    std::cout << "istft " << r.istft << "\n";
    std::cout << "total " << r.total() << "\n";
    std::cout << "reference_decoder " << r.reference_decoder << "\n";
    std::cout.setf(std::ios::fixed);
    std::cout.precision(1);
    std::cout << "decoder_macs_per_sample " << r.decoder_macs_per_sample() << "\n";
    std::cout << "reference_macs_per_sample " << r.reference_macs_per_sample() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FLY-TTS inference engine and performance lab"};
    app.require_subcommand(1);

    std::string preset = "fly-tts";
    std::uint64_t seed = 0;
    std::string out_path;
    std::string weights_path;
    std::string tokens_path;
    bool breakdown = false;
    int repeats = 10;
    int warmups = 3;
    bool compare_reference = false;
    std::string json_path;
    int frames = 400;
    SynthArgs synth;

    auto* cmd_init = app.add_subcommand("init", "initialize weights and write a weight file");
    cmd_init->add_option("--preset", preset, "model preset")
        ->check(CLI::IsMember(kPresets))
        ->capture_default_str();
    cmd_init->add_option("--seed", seed, "init seed")->capture_default_str();
    cmd_init->add_option("--out", out_path, "output weight file")->required();

    auto* cmd_synth = app.add_subcommand("synth", "synthesize a waveform from tokens or text");
    cmd_synth->add_option("--weights", synth.weights_path, "weight file")->required();
    cmd_synth->add_option("--config-preset", synth.preset, "model preset")
        ->check(CLI::IsMember(kPresets))
        ->capture_default_str();
    auto* tokens_opt = cmd_synth->add_option("--tokens", synth.tokens_path, "token id file");
    cmd_synth->add_option("--text", synth.text, "inline text (byte-level tokens)")->excludes(tokens_opt);
    cmd_synth->add_option("--noise-scale", synth.noise_scale, "prior noise scale")->capture_default_str();
    cmd_synth->add_option("--length-scale", synth.length_scale, "duration length scale")
        ->capture_default_str();
    cmd_synth->add_option("--seed", synth.seed, "sampling seed")->capture_default_str();
    cmd_synth->add_option("--out", synth.out_path, "output WAV path")->capture_default_str();

    auto* cmd_params = app.add_subcommand("params", "count distinct parameters in a weight file");
    cmd_params->add_option("--weights", weights_path, "weight file")->required();
    cmd_params->add_flag("--breakdown", breakdown, "per-module counts");

    auto* cmd_bench = app.add_subcommand("bench", "measure real-time factor");
    cmd_bench->add_option("--weights", weights_path, "weight file")->required();
    cmd_bench->add_option("--config-preset", preset, "model preset")
        ->check(CLI::IsMember(kPresets))
        ->capture_default_str();
    cmd_bench->add_option("--tokens", tokens_path, "token id file")->required();
    cmd_bench->add_option("--repeats", repeats, "timed runs")->capture_default_str();
    cmd_bench->add_option("--warmups", warmups, "discarded warmup runs")->capture_default_str();
    cmd_bench->add_flag("--compare-reference", compare_reference,
                        "also time the transposed-conv reference decoder");
    cmd_bench->add_option("--json", json_path, "write machine-readable report ('-' for stdout)");

    auto* cmd_macs = app.add_subcommand("macs", "analytic multiply-accumulate estimate");
    cmd_macs->add_option("--preset", preset, "model preset")
        ->check(CLI::IsMember(kPresets))
        ->capture_default_str();
    cmd_macs->add_option("--frames", frames, "acoustic frame count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_init->parsed()) return run_init(preset, seed, out_path);
        if (cmd_synth->parsed()) {
            if (synth.tokens_path.empty() && synth.text.empty()) {
                std::cerr << "synth: provide --tokens or --text\n";
                return kExitUsage;
            }
            return run_synth(synth);
        }
        if (cmd_params->parsed()) return run_params(weights_path, breakdown);
        if (cmd_bench->parsed()) {
            return run_bench(weights_path, preset, tokens_path, repeats, warmups, compare_reference,
                             json_path);
        }
        if (cmd_macs->parsed()) return run_macs(preset, frames);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
