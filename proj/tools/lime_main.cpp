// lime: experiment runner for the face-screen distance pipeline.
//
//   lime accuracy  --config cfg.json [--seed N] [--trials N] [--out DIR]
//   lime calibrate ...
//   lime power ...
//   lime latency ...
//   lime replay ...

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lime/errors.hpp"
#include "lime/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out_dir;
};

lime::ExperimentConfig resolve_config(const CommonOptions& opts) {
    auto config = opts.config_path ? lime::load_experiment_config(*opts.config_path) : lime::default_experiment_config();
    if (opts.seed) config.seed = *opts.seed;
    if (opts.trials) config.trials = *opts.trials;
    if (opts.out_dir) config.output_dir = *opts.out_dir;
    config.validate();
    return config;
}

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    template <typename Writer>
    void write(const std::string& name, Writer&& writer) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw lime::ConfigError("cannot write " + path.string());
        writer(out);
        if (!out) throw lime::ConfigError("failed writing " + path.string());
        names_.push_back(name);
    }

    void finish(const std::string& command, const lime::ExperimentConfig& config) {
        auto names = names_;
        write("manifest.json", [&](std::ostream& out) { lime::write_manifest(out, command, config, names); });
    }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

int cmd_accuracy(const lime::ExperimentConfig& config) {
    const auto report = lime::run_accuracy(config);
    OutputSet out(config.output_dir);
    out.write("accuracy.csv", [&](std::ostream& os) { lime::write_accuracy_csv(os, report); });
    out.write("accuracy_summary.csv", [&](std::ostream& os) { lime::write_accuracy_summary_csv(os, report); });
    out.finish("accuracy", config);
    for (const auto& s : report.summary) {
        fmt::print("{:<7} sigma={:.4f}px  MSE={:.4f} cm^2  RMSE={:.4f} cm  trials={}\n", lime::to_string(s.lighting),
                   s.sigma_px, s.mse, s.rmse, s.trials);
    }
    return 0;
}

int cmd_calibrate(const lime::ExperimentConfig& config) {
    const auto report = lime::run_calibration(config);
    OutputSet out(config.output_dir);
    out.write("calibration.csv", [&](std::ostream& os) { lime::write_calibration_csv(os, report); });
    out.write("calibration.json", [&](std::ostream& os) { lime::write_calibration_json(os, report); });
    out.finish("calibrate", config);
    for (const auto& r : report.rows) {
        fmt::print("{:<7} target={:.4f} cm^2  sigma={:.6f}px  achieved={:.4f} cm^2\n", lime::to_string(r.lighting),
                   r.target_mse, r.result.sigma_px, r.result.achieved_mse);
    }
    return 0;
}

int cmd_power(const lime::ExperimentConfig& config) {
    const auto report = lime::run_power(config);
    OutputSet out(config.output_dir);
    out.write("power.csv", [&](std::ostream& os) { lime::write_energy_csv(os, report); });
    out.write("events.csv", [&](std::ostream& os) { lime::write_event_log(os, report.events); });
    out.finish("power", config);
    fmt::print("duty cycle {:.4f}, {} captures, camera energy saving {:.1f}%, total saving {:.1f}%\n",
               report.duty_cycle, report.captures, 100.0 * report.camera_energy_saving,
               100.0 * report.total_energy_saving);
    return 0;
}

int cmd_latency(const lime::ExperimentConfig& config) {
    const auto report = lime::run_latency(config);
    OutputSet out(config.output_dir);
    out.write("latency_cdf.csv", [&](std::ostream& os) { lime::write_latency_csv(os, report); });
    out.finish("latency", config);
    fmt::print("{} events, P(latency < 2 s) = {:.4f}\n", report.latencies.size(), report.p_below_2s);
    return 0;
}

int cmd_replay(const lime::ExperimentConfig& config) {
    OutputSet out(config.output_dir);
    const auto& sc = config.scene;

    lime::GateEventLog events;
    double horizon = 0.0;
    if (config.replay.events) {
        std::ifstream in(*config.replay.events);
        if (!in) throw lime::ConfigError("cannot open " + config.replay.events->string());
        events = lime::read_event_log(in);
        horizon = events.empty() ? 0.0 : events.back().timestamp;
    } else {
        const auto trace = lime::load_or_synthesize_trace(sc.trace);
        events = lime::run_gate(trace, config.gate);
        horizon = lime::trace_horizon(sc.trace, trace);
        out.write("events.csv", [&](std::ostream& os) { lime::write_event_log(os, events); });
    }

    std::vector<lime::DetectionFrame> frames;
    if (config.replay.frames) {
        std::ifstream in(*config.replay.frames);
        if (!in) throw lime::ConfigError("cannot open " + config.replay.frames->string());
        frames = lime::read_frame_log(in);
    } else {
        auto noise = sc.noise;
        noise.seed = config.seed;
        // One extra period so that a capture at the horizon still aligns.
        frames = lime::render_frames(sc.scene(), noise, horizon + sc.frame_period_s);
        out.write("frames.csv", [&](std::ostream& os) { lime::write_frame_log(os, frames); });
    }

    const lime::ReplayOptions options{sc.cam, sc.default_ipd, config.hysteresis_pt, config.replay.alignment_tolerance_s};
    const auto result = lime::replay(frames, events, config.policy, options);
    out.write("decisions.csv", [&](std::ostream& os) { lime::write_decision_log(os, result.decisions); });
    out.finish("replay", config);
    fmt::print("{} decisions, {} clamped faces skipped, {} captures without a usable face\n", result.decisions.size(),
               result.skipped_observations, result.empty_captures);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Face-screen distance estimation experiments"};
    app.require_subcommand(1);

    CommonOptions opts;
    int status = 0;
    std::function<int(const lime::ExperimentConfig&)> action;

    const std::vector<std::pair<std::string, std::pair<std::string, int (*)(const lime::ExperimentConfig&)>>> commands{
        {"accuracy", {"Estimate distance error per lighting level and distance", cmd_accuracy}},
        {"calibrate", {"Fit pixel-noise sigma per lighting level to the target MSEs", cmd_calibrate}},
        {"power", {"Replay the accelerometer trace through the camera gate", cmd_power}},
        {"latency", {"Simulate the motion-to-font-update latency CDF", cmd_latency}},
        {"replay", {"Run captures through localization, centering and the font policy", cmd_replay}},
    };
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "Root random seed");
        sub->add_option("--out", opts.out_dir, "Output directory");
        sub->add_option("--trials", opts.trials, "Trials per accuracy row / calibration")->check(CLI::PositiveNumber);
        auto* fn = entry.second;
        sub->callback([&action, fn] { action = fn; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        status = action(resolve_config(opts));
    } catch (const lime::Error& e) {
        std::cerr << "lime: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lime: unexpected error: " << e.what() << '\n';
        return 3;
    }
    return status;
}
