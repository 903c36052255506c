#pragma once

// Experiment runner: wires scene simulation, estimation, gating and the font
// policy together and produces the accuracy, power, latency and replay
// reports.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lime/camera_geometry.hpp"
#include "lime/multi_user.hpp"
#include "lime/policy.hpp"
#include "lime/power_gate.hpp"
#include "lime/scene_sim.hpp"

namespace lime {

inline constexpr const char* kVersion = "1.0.0";

struct TraceSpec {
    std::vector<MotionSegment> segments;
    double duration_s = 60.0;
    double sample_rate_hz = 50.0;
    std::uint64_t seed = 42;
    /// When set, samples are read from this file instead of synthesized.
    std::optional<std::filesystem::path> file;
};

/// Contents of a scene file.
struct SceneConfig {
    CameraIntrinsics cam = CameraIntrinsics::from_degrees(60.0, 640.0);
    InterpupillaryDistance default_ipd;
    Lighting lighting = Lighting::Modest;
    double frame_period_s = 0.1;
    std::vector<SceneViewer> viewers;
    NoiseModel noise;  // seed unused; experiments supply their own
    TraceSpec trace;

    Scene scene() const { return Scene(viewers, cam, lighting, frame_period_s); }
};

/// One latency stage: a fixed delay plus exponential jitter with the given
/// mean (zero mean means no jitter).
struct DelayModel {
    double base_s = 0.0;
    double jitter_mean_s = 0.0;
};

struct LatencyConfig {
    DelayModel capture{0.3, 0.25};
    DelayModel detection{0.5, 0.35};
    DelayModel policy{0.05, 0.0};
    std::size_t events = 10000;
};

/// Linear energy proxy: base * horizon + camera * open_time.
struct EnergyModel {
    double base_power = 0.3;
    double camera_power = 1.0;
};

struct ReplayConfig {
    std::optional<std::filesystem::path> frames;
    std::optional<std::filesystem::path> events;
    double alignment_tolerance_s = 0.1;
};

struct ExperimentConfig {
    std::optional<std::filesystem::path> scene_file;
    SceneConfig scene;
    GateConfig gate;
    FontPolicy policy = FontPolicy::standard();
    double hysteresis_pt = FontPolicy::kDefaultHysteresisPt;
    std::uint64_t seed = 42;
    std::size_t trials = 1000;
    std::filesystem::path output_dir = "out";

    std::vector<double> accuracy_distances_cm{30.0, 40.0, 50.0, 60.0, 70.0};
    std::vector<Lighting> accuracy_lightings{Lighting::Dark, Lighting::Modest, Lighting::Bright};
    /// Target MSE (cm^2) per lighting, indexed by Lighting.
    std::array<double, 3> calibration_targets{0.6761, 0.8976, 2.3878};
    std::optional<std::filesystem::path> noise_file;

    EnergyModel energy;
    LatencyConfig latency;
    ReplayConfig replay;

    void validate() const;
};

/// Built-in configuration: the shipped reference scene and trace with every
/// default applied.
ExperimentConfig default_experiment_config();

/// Loads a JSON experiment config. Relative paths resolve against the
/// config file's directory. Throws ConfigError.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
SceneConfig load_scene_config(const std::filesystem::path& path);

/// Normalized JSON echo of the effective configuration.
std::string config_to_json(const ExperimentConfig& config);

/// Per-lighting sigmas from a file written by write_calibration_json.
std::array<double, 3> load_noise_sigmas(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Accuracy

struct AccuracyRow {
    Lighting lighting = Lighting::Modest;
    double sigma_px = 0.0;
    double true_distance_cm = 0.0;
    double mean_estimate_cm = 0.0;
    double mse = 0.0;   // cm^2
    double rmse = 0.0;  // cm
    std::size_t trials = 0;
    std::size_t clamped = 0;
};

/// All rows of one lighting level pooled.
struct AccuracySummary {
    Lighting lighting = Lighting::Modest;
    double sigma_px = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double std_error = 0.0;  // of the pooled MSE
    std::size_t trials = 0;
};

struct AccuracyReport {
    std::vector<AccuracyRow> rows;  // sorted by (lighting, distance)
    std::vector<AccuracySummary> summary;
    std::uint64_t seed = 0;
};

AccuracyReport run_accuracy(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationRow {
    Lighting lighting = Lighting::Modest;
    double target_mse = 0.0;
    Calibration result;
};

struct CalibrationReport {
    std::vector<CalibrationRow> rows;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
};

/// Calibrates sigma for each lighting over the accuracy distances.
CalibrationReport run_calibration(const ExperimentConfig& config);

/// Copy of `config` with the calibrated sigmas installed.
ExperimentConfig with_calibrated_noise(ExperimentConfig config, const CalibrationReport& calibration);

// ---------------------------------------------------------------------------
// Power

struct EnergyReport {
    double horizon_s = 0.0;
    double duty_cycle = 0.0;
    std::size_t captures = 0;
    std::size_t opens = 0;
    double energy_always_on = 0.0;
    double energy_gated = 0.0;
    /// 1 - gated camera energy / always-on camera energy.
    double camera_energy_saving = 0.0;
    double total_energy_saving = 0.0;
    GateEventLog events;
};

std::vector<MotionSample> load_or_synthesize_trace(const TraceSpec& spec);
double trace_horizon(const TraceSpec& spec, std::span<const MotionSample> trace);

EnergyReport run_power(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Latency

struct CdfPoint {
    double latency_s = 0.0;
    double probability = 0.0;  // P(latency <= latency_s)
};

struct LatencyReport {
    std::vector<double> latencies;  // sorted
    std::vector<CdfPoint> cdf;      // one point per distinct latency
    double p_below_2s = 0.0;        // P(latency < 2 s)
};

/// Empirical CDF of modeled motion-to-font-update latency.
LatencyReport run_latency(const ExperimentConfig& config);

/// Empirical CDF over distinct values of `samples`.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

// ---------------------------------------------------------------------------
// Replay

struct ReplayDecision {
    double timestamp = 0.0;      // of the Capture event
    std::size_t frame_index = 0;
    std::size_t viewers = 0;
    DisplayDecision decision;
};

struct ReplayOptions {
    CameraIntrinsics cam;
    InterpupillaryDistance ipd;
    double hysteresis_pt = FontPolicy::kDefaultHysteresisPt;
    double alignment_tolerance_s = 0.1;
};

struct ReplayResult {
    std::vector<ReplayDecision> decisions;
    std::size_t skipped_observations = 0;  // clamped faces left out
    std::size_t empty_captures = 0;        // captures whose frame had no usable face
};

/// For each Capture, takes the first frame at or after it (within the
/// alignment tolerance, else AlignmentError), locates every unclamped face,
/// and chains font decisions through hysteresis. Frames must be sorted by
/// timestamp.
ReplayResult replay(std::span<const DetectionFrame> frames, std::span<const GateEvent> events,
                    const FontPolicy& policy, const ReplayOptions& options);

/// Frames rendered from the scene at its frame period over [0, horizon).
std::vector<DetectionFrame> render_frames(const Scene& scene, const NoiseModel& noise, double horizon_s);

// ---------------------------------------------------------------------------
// Report files: header row plus comma-separated values.

void write_accuracy_csv(std::ostream& out, const AccuracyReport& report);
void write_accuracy_summary_csv(std::ostream& out, const AccuracyReport& report);
void write_calibration_csv(std::ostream& out, const CalibrationReport& report);
void write_calibration_json(std::ostream& out, const CalibrationReport& report);
void write_energy_csv(std::ostream& out, const EnergyReport& report);
void write_latency_csv(std::ostream& out, const LatencyReport& report);
void write_decision_log(std::ostream& out, std::span<const ReplayDecision> decisions);

/// Run manifest: command, seed, versions and the config echo, as JSON.
void write_manifest(std::ostream& out, const std::string& command, const ExperimentConfig& config,
                    const std::vector<std::string>& outputs);

}  // namespace lime
