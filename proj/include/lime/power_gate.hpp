#pragma once

// Motion-gated camera controller.
//
// The camera opens (and immediately takes a photo) when the accelerometer
// shows movement, keeps capturing at a bounded rate while movement
// persists, and closes once the phone has been still for a timeout. The
// gate is a pure state machine clocked by sample timestamps.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lime {

inline constexpr double kStandardGravity = 9.80665;

struct MotionSample {
    double timestamp = 0.0;              // seconds
    std::array<double, 3> accel{};       // m/s^2

    friend bool operator==(const MotionSample&, const MotionSample&) = default;
};

struct GateConfig {
    double motion_threshold = 0.8;       // m/s^2 deviation of |accel| from g
    double window = 0.25;                // s
    double stationary_timeout = 2.0;     // s
    double min_capture_interval = 0.5;   // s

    /// Throws ConfigError unless all fields are positive and
    /// stationary_timeout >= window. A zero threshold is accepted: it gates
    /// on any deviation at all, i.e. an effectively always-on camera.
    void validate() const;
};

enum class GateMode { CameraClosed, CameraOpen };

struct GateState {
    GateMode mode = GateMode::CameraClosed;
    double last_motion_at = 0.0;
    std::optional<double> last_capture_at;
    std::optional<double> last_sample_at;
    /// Samples no older than `window` relative to the latest one.
    std::vector<MotionSample> window;
};

enum class GateEventKind { Open, Capture, Close };

struct GateEvent {
    double timestamp = 0.0;
    GateEventKind kind = GateEventKind::Open;

    friend bool operator==(const GateEvent&, const GateEvent&) = default;
};

using GateEventLog = std::vector<GateEvent>;

std::string_view to_string(GateEventKind kind);
/// Parses "Open", "Capture" or "Close"; throws ParseError otherwise.
GateEventKind parse_event_kind(std::string_view text);

/// | |accel| - g |
double gravity_deviation(const MotionSample& sample);

/// True iff some sample in the window deviates from gravity by more than
/// the motion threshold.
bool detect_motion(std::span<const MotionSample> window, const GateConfig& cfg);

struct StepResult {
    GateState state;
    std::vector<GateEvent> events;
};

/// Advances the gate by one sample. Motion while closed opens the camera
/// and captures at once; while open, motion captures at most every
/// min_capture_interval; stillness for stationary_timeout closes it. The
/// capture spacing holds across a close and reopen too, so a reopen soon
/// after the last capture emits only Open. Throws ClockError if the
/// timestamp does not strictly exceed the previous one.
StepResult step(GateState state, const MotionSample& sample, const GateConfig& cfg);

/// Feeds a whole trace through a fresh gate.
GateEventLog run_gate(std::span<const MotionSample> trace, const GateConfig& cfg);

/// Fraction of [0, horizon] during which the camera is open. An Open
/// without a matching Close stays open until the horizon. Throws
/// MalformedLog on out-of-order events, a Close or Capture while closed, or
/// a repeated Open.
double duty_cycle(std::span<const GateEvent> events, double horizon);

/// Checks ordering and alternation; throws MalformedLog on the first
/// violation.
void validate_event_log(std::span<const GateEvent> events);

// Line formats: traces are `timestamp_s,ax,ay,az`, event logs are
// `timestamp_s,kind`. Readers skip blank lines, `#` comments and a header
// line.
std::vector<MotionSample> read_trace(std::istream& in);
void write_trace(std::ostream& out, std::span<const MotionSample> trace);
GateEventLog read_event_log(std::istream& in);
void write_event_log(std::ostream& out, std::span<const GateEvent> events);

}  // namespace lime
