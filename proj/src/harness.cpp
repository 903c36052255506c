#include "lime/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "lime/errors.hpp"
#include "lime/random.hpp"

namespace lime {

namespace {

// Stream identifiers mixed into the root seed so that the experiments never
// share random numbers.
constexpr std::uint64_t kAccuracyStream = 0x1000;
constexpr std::uint64_t kCalibrationStream = 0x2000;
constexpr std::uint64_t kLatencyStream = 0x3000;

}  // namespace

// ---------------------------------------------------------------------------
// Accuracy

AccuracyReport run_accuracy(const ExperimentConfig& config) {
    config.validate();
    const auto& sc = config.scene;

    auto lightings = config.accuracy_lightings;
    std::sort(lightings.begin(), lightings.end());
    lightings.erase(std::unique(lightings.begin(), lightings.end()), lightings.end());
    auto distances = config.accuracy_distances_cm;
    std::sort(distances.begin(), distances.end());
    distances.erase(std::unique(distances.begin(), distances.end()), distances.end());

    AccuracyReport report;
    report.seed = config.seed;
    for (auto lighting : lightings) {
        double pooled_sum = 0.0;
        double pooled_sum_sq = 0.0;
        std::size_t pooled_n = 0;
        for (std::size_t di = 0; di < distances.size(); ++di) {
            const double distance = distances[di];
            const std::uint64_t row_id = kAccuracyStream + static_cast<std::uint64_t>(lighting) * 0x100 + di;
            Scene scene({SceneViewer{UserPosition{distance, 0.0}, sc.default_ipd}}, sc.cam, lighting, sc.frame_period_s);
            NoiseModel noise = sc.noise;
            noise.seed = derive_seed(config.seed, row_id);

            AccuracyRow row;
            row.lighting = lighting;
            row.sigma_px = noise.sigma(lighting);
            row.true_distance_cm = distance;
            double sum_est = 0.0;
            double sum_sq = 0.0;
            for (std::size_t trial = 0; trial < config.trials; ++trial) {
                const auto frame = render_frame(scene, noise, trial);
                if (frame.clamped.front()) {
                    ++row.clamped;
                    continue;
                }
                const double estimate = estimate_distance(frame.observations.front(), sc.cam, sc.default_ipd);
                const double err = estimate - distance;
                sum_est += estimate;
                sum_sq += err * err;
                pooled_sum_sq += err * err * err * err;
                ++row.trials;
            }
            if (row.trials == 0) {
                throw DomainError(fmt::format("accuracy row ({}, {} cm): every trial was clamped", to_string(lighting), distance));
            }
            const auto n = static_cast<double>(row.trials);
            row.mean_estimate_cm = sum_est / n;
            row.mse = sum_sq / n;
            row.rmse = std::sqrt(row.mse);
            pooled_sum += sum_sq;
            pooled_n += row.trials;
            report.rows.push_back(row);
        }
        AccuracySummary s;
        s.lighting = lighting;
        s.sigma_px = sc.noise.sigma(lighting);
        s.trials = pooled_n;
        const auto n = static_cast<double>(pooled_n);
        s.mse = pooled_sum / n;
        s.rmse = std::sqrt(s.mse);
        const double var = pooled_n > 1 ? std::max(0.0, (pooled_sum_sq - n * s.mse * s.mse) / (n - 1.0)) : 0.0;
        s.std_error = std::sqrt(var / n);
        report.summary.push_back(s);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Calibration

CalibrationReport run_calibration(const ExperimentConfig& config) {
    config.validate();
    const SceneFamily family{config.scene.cam, config.scene.default_ipd, config.accuracy_distances_cm};
    CalibrationReport report;
    report.seed = config.seed;
    report.trials = config.trials;
    for (auto lighting : kAllLightings) {
        const double target = config.calibration_targets[static_cast<std::size_t>(lighting)];
        // Common random numbers across lightings: with MSE increasing in
        // sigma, ordered targets then give ordered sigmas.
        const auto result = calibrate_noise(target, family, config.trials, derive_seed(config.seed, kCalibrationStream));
        report.rows.push_back(CalibrationRow{lighting, target, result});
    }
    return report;
}

ExperimentConfig with_calibrated_noise(ExperimentConfig config, const CalibrationReport& calibration) {
    for (const auto& row : calibration.rows) config.scene.noise.set_sigma(row.lighting, row.result.sigma_px);
    return config;
}

// ---------------------------------------------------------------------------
// Power

std::vector<MotionSample> load_or_synthesize_trace(const TraceSpec& spec) {
    if (spec.file) {
        std::ifstream in(*spec.file);
        if (!in) throw ConfigError("cannot open trace file " + spec.file->string());
        return read_trace(in);
    }
    return synthesize_accel_trace(spec.segments, spec.duration_s, spec.sample_rate_hz, spec.seed);
}

double trace_horizon(const TraceSpec& spec, std::span<const MotionSample> trace) {
    if (!spec.file) return spec.duration_s;
    if (trace.size() < 2) return trace.empty() ? 0.0 : trace.back().timestamp;
    // A recorded trace covers up to one sample period past its last sample.
    const double period = trace.back().timestamp - trace[trace.size() - 2].timestamp;
    return trace.back().timestamp + period;
}

EnergyReport run_power(const ExperimentConfig& config) {
    config.validate();
    const auto trace = load_or_synthesize_trace(config.scene.trace);
    EnergyReport report;
    report.horizon_s = trace_horizon(config.scene.trace, trace);
    if (!(report.horizon_s > 0.0)) throw ConfigError("power experiment needs a trace with a positive horizon");
    report.events = run_gate(trace, config.gate);
    report.duty_cycle = duty_cycle(report.events, report.horizon_s);
    for (const auto& e : report.events) {
        if (e.kind == GateEventKind::Capture) ++report.captures;
        if (e.kind == GateEventKind::Open) ++report.opens;
    }
    const auto& em = config.energy;
    const double open_time = report.duty_cycle * report.horizon_s;
    report.energy_always_on = em.base_power * report.horizon_s + em.camera_power * report.horizon_s;
    report.energy_gated = em.base_power * report.horizon_s + em.camera_power * open_time;
    report.camera_energy_saving = 1.0 - report.duty_cycle;
    report.total_energy_saving =
        report.energy_always_on > 0.0 ? 1.0 - report.energy_gated / report.energy_always_on : 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Latency

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    std::vector<CdfPoint> cdf;
    const auto n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        cdf.push_back(CdfPoint{samples[i], static_cast<double>(i + 1) / n});
    }
    return cdf;
}

LatencyReport run_latency(const ExperimentConfig& config) {
    config.validate();
    const auto& lc = config.latency;
    Rng rng(derive_seed(config.seed, kLatencyStream));
    LatencyReport report;
    report.latencies.reserve(lc.events);
    std::size_t below = 0;
    for (std::size_t i = 0; i < lc.events; ++i) {
        double latency = 0.0;
        for (const auto* stage : {&lc.capture, &lc.detection, &lc.policy}) {
            latency += stage->base_s + rng.exponential(stage->jitter_mean_s);
        }
        if (latency < 2.0) ++below;
        report.latencies.push_back(latency);
    }
    std::sort(report.latencies.begin(), report.latencies.end());
    report.cdf = empirical_cdf(report.latencies);
    report.p_below_2s = static_cast<double>(below) / static_cast<double>(lc.events);
    return report;
}

// ---------------------------------------------------------------------------
// Replay

ReplayResult replay(std::span<const DetectionFrame> frames, std::span<const GateEvent> events,
                    const FontPolicy& policy, const ReplayOptions& options) {
    validate_event_log(events);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].timestamp < frames[i - 1].timestamp) throw AlignmentError("frames are not sorted by timestamp");
    }

    ReplayResult result;
    std::optional<DisplayDecision> previous;
    for (const auto& event : events) {
        if (event.kind != GateEventKind::Capture) continue;
        const auto it = std::lower_bound(frames.begin(), frames.end(), event.timestamp,
                                         [](const DetectionFrame& f, double t) { return f.timestamp < t; });
        if (it == frames.end() || it->timestamp - event.timestamp > options.alignment_tolerance_s) {
            throw AlignmentError(fmt::format("no frame within {} s after the capture at {} s",
                                             options.alignment_tolerance_s, event.timestamp));
        }
        ViewerSet viewers;
        for (std::size_t i = 0; i < it->observations.size(); ++i) {
            if (i < it->clamped.size() && it->clamped[i]) {
                ++result.skipped_observations;
                continue;
            }
            viewers.push_back(locate_viewer(it->observations[i], options.cam, options.ipd));
        }
        if (viewers.empty()) {
            ++result.empty_captures;
            continue;
        }
        const auto center = compute_center(viewers);
        const auto decision = apply_hysteresis(previous, font_size_for(center, policy), options.hysteresis_pt, center);
        previous = decision;
        result.decisions.push_back(ReplayDecision{event.timestamp, it->index, viewers.size(), decision});
    }
    return result;
}

std::vector<DetectionFrame> render_frames(const Scene& scene, const NoiseModel& noise, double horizon_s) {
    std::vector<DetectionFrame> frames;
    for (std::size_t i = 0; static_cast<double>(i) * scene.frame_period() < horizon_s; ++i) {
        frames.push_back(render_frame(scene, noise, i));
    }
    return frames;
}

// ---------------------------------------------------------------------------
// Report files

void write_accuracy_csv(std::ostream& out, const AccuracyReport& report) {
    out << "lighting,sigma_px,true_distance_cm,mean_estimate_cm,mse_cm2,rmse_cm,trials,clamped\n";
    for (const auto& r : report.rows) {
        fmt::print(out, "{},{},{},{},{},{},{},{}\n", to_string(r.lighting), r.sigma_px, r.true_distance_cm,
                   r.mean_estimate_cm, r.mse, r.rmse, r.trials, r.clamped);
    }
}

void write_accuracy_summary_csv(std::ostream& out, const AccuracyReport& report) {
    out << "lighting,sigma_px,mse_cm2,rmse_cm,mse_std_error,trials\n";
    for (const auto& s : report.summary) {
        fmt::print(out, "{},{},{},{},{},{}\n", to_string(s.lighting), s.sigma_px, s.mse, s.rmse, s.std_error, s.trials);
    }
}

void write_calibration_csv(std::ostream& out, const CalibrationReport& report) {
    out << "lighting,target_mse_cm2,sigma_px,achieved_mse_cm2,iterations\n";
    for (const auto& r : report.rows) {
        fmt::print(out, "{},{},{},{},{}\n", to_string(r.lighting), r.target_mse, r.result.sigma_px,
                   r.result.achieved_mse, r.result.iterations);
    }
}

void write_calibration_json(std::ostream& out, const CalibrationReport& report) {
    nlohmann::json sigmas = nlohmann::json::object();
    nlohmann::json targets = nlohmann::json::object();
    for (const auto& r : report.rows) {
        sigmas[std::string(to_string(r.lighting))] = r.result.sigma_px;
        targets[std::string(to_string(r.lighting))] = r.target_mse;
    }
    nlohmann::json j = {{"sigma_px", sigmas}, {"target_mse", targets}, {"seed", report.seed}, {"trials", report.trials}};
    out << j.dump(2) << '\n';
}

void write_energy_csv(std::ostream& out, const EnergyReport& r) {
    out << "horizon_s,duty_cycle,captures,opens,energy_always_on,energy_gated,camera_energy_saving,total_energy_saving\n";
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", r.horizon_s, r.duty_cycle, r.captures, r.opens, r.energy_always_on,
               r.energy_gated, r.camera_energy_saving, r.total_energy_saving);
}

void write_latency_csv(std::ostream& out, const LatencyReport& report) {
    out << "latency_s,cdf\n";
    for (const auto& p : report.cdf) fmt::print(out, "{},{}\n", p.latency_s, p.probability);
}

void write_decision_log(std::ostream& out, std::span<const ReplayDecision> decisions) {
    out << "timestamp_s,frame,viewers,center_distance_cm,center_bearing_rad,font_size_pt,hysteresis_applied\n";
    for (const auto& d : decisions) {
        fmt::print(out, "{},{},{},{},{},{},{}\n", d.timestamp, d.frame_index, d.viewers, d.decision.source_center.distance,
                   d.decision.source_center.bearing, d.decision.font_size, d.decision.hysteresis_applied ? 1 : 0);
    }
}

void write_manifest(std::ostream& out, const std::string& command, const ExperimentConfig& config,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j = {
        {"command", command},
        {"seed", config.seed},
        {"trials", config.trials},
        {"versions", {{"lime", kVersion}, {"rng", Rng::kAlgorithm}}},
        {"outputs", outputs},
        {"config", nlohmann::json::parse(config_to_json(config))},
    };
    out << j.dump(2) << '\n';
}

}  // namespace lime
