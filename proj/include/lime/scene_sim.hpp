#pragma once

// Synthetic scenes: ground-truth viewer layouts, emulated face-detector
// output with lighting-dependent pixel noise, and synthetic accelerometer
// traces.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "lime/camera_geometry.hpp"
#include "lime/power_gate.hpp"

namespace lime {

enum class Lighting { Dark, Modest, Bright };

inline constexpr std::array<Lighting, 3> kAllLightings{Lighting::Dark, Lighting::Modest, Lighting::Bright};

std::string_view to_string(Lighting lighting);
/// Case-insensitive "dark" / "modest" / "bright"; throws ConfigError.
Lighting parse_lighting(std::string_view text);

struct SceneViewer {
    UserPosition position;
    InterpupillaryDistance ipd;
};

class Scene {
public:
    /// Throws OutOfFrame if a viewer's eyes do not fit in the frame or its
    /// bearing is not strictly inside the half field of view.
    Scene(std::vector<SceneViewer> viewers, CameraIntrinsics cam, Lighting lighting,
          double frame_period_s = 0.1);

    const std::vector<SceneViewer>& viewers() const { return viewers_; }
    const CameraIntrinsics& camera() const { return cam_; }
    Lighting lighting() const { return lighting_; }
    double frame_period() const { return frame_period_; }

    /// Noise-free detector output for viewer `i`.
    EyeObservation ideal_observation(std::size_t i) const;

    /// Index pairs whose projected eye spans overlap horizontally.
    std::vector<std::pair<std::size_t, std::size_t>> overlapping_viewers() const;

private:
    std::vector<SceneViewer> viewers_;
    CameraIntrinsics cam_;
    Lighting lighting_;
    double frame_period_;
};

/// Per-lighting pixel noise standard deviation plus the root seed.
struct NoiseModel {
    std::array<double, 3> sigma_px{0.0, 0.0, 0.0};  // indexed by Lighting
    std::uint64_t seed = 0;

    double sigma(Lighting lighting) const { return sigma_px[static_cast<std::size_t>(lighting)]; }
    void set_sigma(Lighting lighting, double value);

    static NoiseModel uniform(double sigma, std::uint64_t seed);
};

/// Smallest eye distance a noisy observation may take; anything below is
/// clamped up and flagged.
inline constexpr double kMinEyeDistancePx = 0.1;

struct DetectionFrame {
    std::size_t index = 0;
    double timestamp = 0.0;
    std::vector<EyeObservation> observations;  // scene order
    std::vector<bool> clamped;                 // parallel to observations

    bool any_clamped() const;
};

/// Emulated detector output for frame `frame_index`, a pure function of
/// (scene, noise, frame_index). Each E and O gets independent zero-mean
/// Gaussian noise of the scene lighting's sigma. Values pushed outside
/// their valid range (E < 0.1 px or E > W, |O| > W/2) are clamped to it and
/// flagged.
DetectionFrame render_frame(const Scene& scene, const NoiseModel& noise, std::size_t frame_index);

/// Motion burst: a sinusoidal swing of the acceleration magnitude.
struct MotionSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    double amplitude = 0.0;  // m/s^2, peak deviation from g
    double frequency = 0.0;  // Hz
};

/// Samples at k / sample_rate for 0 <= k < duration * sample_rate.
///
/// At rest the reading is gravity along z plus per-axis uniform noise small
/// enough that | |a| - g | < 0.05 m/s^2. Inside a segment the magnitude
/// swings as g + amplitude * cos(2 pi f (t - t0)), t0 being the segment's
/// first sample, so the sampled peak deviation hits the amplitude. Throws
/// SpecError for overlapping or out-of-range segments.
std::vector<MotionSample> synthesize_accel_trace(std::span<const MotionSegment> segments, double duration_s,
                                                 double sample_rate_hz, std::uint64_t seed);

/// Range of single-viewer scenes used for noise calibration: every trial
/// places one on-axis viewer at one of `distances_cm`, cycling through
/// them.
struct SceneFamily {
    CameraIntrinsics cam;
    InterpupillaryDistance ipd;
    std::vector<double> distances_cm;
};

struct MseEstimate {
    double mse = 0.0;        // cm^2
    double std_error = 0.0;  // of the MSE
    std::size_t trials = 0;  // unclamped trials entering the statistic
    std::size_t clamped = 0;
};

/// Monte-Carlo MSE of estimate_distance over the family with eye-distance
/// noise sigma_px. Trial k draws from the stream derive_seed(seed, k), so a
/// fixed seed gives common random numbers across sigmas. Clamped trials are
/// counted but excluded.
MseEstimate simulate_distance_mse(const SceneFamily& family, double sigma_px, std::size_t trials,
                                  std::uint64_t seed);

struct Calibration {
    double sigma_px = 0.0;
    double achieved_mse = 0.0;
    int iterations = 0;
};

/// Bisects sigma in [0, 50] px until the simulated MSE matches the target
/// within 0.1 %. Throws DomainError for target <= 0 and ConvergenceError
/// if the target is above the MSE at 50 px.
Calibration calibrate_noise(double target_mse, const SceneFamily& family, std::size_t trials,
                            std::uint64_t seed);

// Frame log lines are `frame,timestamp_s,viewer_index,E_px,O_px,clamped`.
void write_frame_log(std::ostream& out, std::span<const DetectionFrame> frames);
std::vector<DetectionFrame> read_frame_log(std::istream& in);

}  // namespace lime
