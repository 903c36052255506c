#include "lime/power_gate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lime/errors.hpp"
#include "line_io.hpp"

namespace lime {

void GateConfig::validate() const {
    if (!(motion_threshold >= 0.0)) throw ConfigError("gate motion_threshold must be >= 0");
    if (!(window > 0.0)) throw ConfigError("gate window must be positive");
    if (!(stationary_timeout > 0.0)) throw ConfigError("gate stationary_timeout must be positive");
    if (!(min_capture_interval > 0.0)) throw ConfigError("gate min_capture_interval must be positive");
    if (stationary_timeout < window) throw ConfigError("gate stationary_timeout must be >= window");
}

std::string_view to_string(GateEventKind kind) {
    switch (kind) {
        case GateEventKind::Open: return "Open";
        case GateEventKind::Capture: return "Capture";
        case GateEventKind::Close: return "Close";
    }
    return "?";
}

GateEventKind parse_event_kind(std::string_view text) {
    if (text == "Open") return GateEventKind::Open;
    if (text == "Capture") return GateEventKind::Capture;
    if (text == "Close") return GateEventKind::Close;
    throw ParseError("unknown gate event kind '" + std::string(text) + "'");
}

double gravity_deviation(const MotionSample& sample) {
    const auto& a = sample.accel;
    return std::abs(std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) - kStandardGravity);
}

bool detect_motion(std::span<const MotionSample> window, const GateConfig& cfg) {
    return std::any_of(window.begin(), window.end(),
                       [&](const MotionSample& s) { return gravity_deviation(s) > cfg.motion_threshold; });
}

StepResult step(GateState state, const MotionSample& sample, const GateConfig& cfg) {
    const double t = sample.timestamp;
    if (state.last_sample_at && !(t > *state.last_sample_at)) {
        throw ClockError(fmt::format("sample timestamp {} does not follow {}", t, *state.last_sample_at));
    }
    state.last_sample_at = t;

    state.window.push_back(sample);
    // The current sample always stays, even with a tiny window.
    const auto stale = std::find_if(state.window.begin(), state.window.end() - 1,
                                    [&](const MotionSample& s) { return s.timestamp > t - cfg.window; });
    state.window.erase(state.window.begin(), stale);

    // last_motion_at tracks the newest sample that itself deviated; the
    // window only widens what counts as "moving" for capture decisions.
    if (gravity_deviation(sample) > cfg.motion_threshold) state.last_motion_at = t;
    const bool moving = detect_motion(state.window, cfg);

    std::vector<GateEvent> events;
    if (state.mode == GateMode::CameraClosed) {
        if (moving) {
            state.mode = GateMode::CameraOpen;
            events.push_back({t, GateEventKind::Open});
            // A quick reopen still honors the spacing from the last capture.
            if (!state.last_capture_at || t - *state.last_capture_at >= cfg.min_capture_interval) {
                state.last_capture_at = t;
                events.push_back({t, GateEventKind::Capture});
            }
        }
    } else if (!moving && t - state.last_motion_at >= cfg.stationary_timeout) {
        state.mode = GateMode::CameraClosed;
        events.push_back({t, GateEventKind::Close});
    } else if (moving && (!state.last_capture_at || t - *state.last_capture_at >= cfg.min_capture_interval)) {
        state.last_capture_at = t;
        events.push_back({t, GateEventKind::Capture});
    }
    return StepResult{std::move(state), std::move(events)};
}

GateEventLog run_gate(std::span<const MotionSample> trace, const GateConfig& cfg) {
    cfg.validate();
    GateState state;
    GateEventLog log;
    for (const auto& sample : trace) {
        auto result = step(std::move(state), sample, cfg);
        state = std::move(result.state);
        log.insert(log.end(), result.events.begin(), result.events.end());
    }
    return log;
}

void validate_event_log(std::span<const GateEvent> events) {
    bool open = false;
    double prev = -INFINITY;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (!std::isfinite(e.timestamp)) throw MalformedLog(fmt::format("event {}: non-finite timestamp", i));
        if (e.timestamp < prev) throw MalformedLog(fmt::format("event {}: timestamp {} goes backwards", i, e.timestamp));
        prev = e.timestamp;
        switch (e.kind) {
            case GateEventKind::Open:
                if (open) throw MalformedLog(fmt::format("event {}: Open while already open", i));
                open = true;
                break;
            case GateEventKind::Capture:
                if (!open) throw MalformedLog(fmt::format("event {}: Capture while closed", i));
                break;
            case GateEventKind::Close:
                if (!open) throw MalformedLog(fmt::format("event {}: Close without Open", i));
                open = false;
                break;
        }
    }
}

double duty_cycle(std::span<const GateEvent> events, double horizon) {
    if (!(horizon > 0.0)) throw MalformedLog("duty cycle horizon must be positive");
    validate_event_log(events);
    double open_time = 0.0;
    double opened_at = 0.0;
    bool open = false;
    for (const auto& e : events) {
        if (e.kind == GateEventKind::Open) {
            opened_at = std::clamp(e.timestamp, 0.0, horizon);
            open = true;
        } else if (e.kind == GateEventKind::Close) {
            open_time += std::clamp(e.timestamp, 0.0, horizon) - opened_at;
            open = false;
        }
    }
    if (open) open_time += horizon - opened_at;
    return std::clamp(open_time / horizon, 0.0, 1.0);
}

std::vector<MotionSample> read_trace(std::istream& in) {
    std::vector<MotionSample> trace;
    detail::for_each_record(in, [&](const auto& fields, std::size_t line_no) {
        if (fields.size() != 4) {
            throw ParseError(fmt::format("line {}: expected timestamp_s,ax,ay,az", line_no));
        }
        MotionSample s;
        s.timestamp = detail::parse_double_or_throw(fields[0], line_no);
        for (int k = 0; k < 3; ++k) s.accel[k] = detail::parse_double_or_throw(fields[k + 1], line_no);
        trace.push_back(s);
    });
    return trace;
}

void write_trace(std::ostream& out, std::span<const MotionSample> trace) {
    out << "timestamp_s,ax,ay,az\n";
    for (const auto& s : trace) {
        fmt::print(out, "{},{},{},{}\n", s.timestamp, s.accel[0], s.accel[1], s.accel[2]);
    }
}

GateEventLog read_event_log(std::istream& in) {
    GateEventLog log;
    detail::for_each_record(in, [&](const auto& fields, std::size_t line_no) {
        if (fields.size() != 2) throw ParseError(fmt::format("line {}: expected timestamp_s,kind", line_no));
        log.push_back({detail::parse_double_or_throw(fields[0], line_no), parse_event_kind(fields[1])});
    });
    return log;
}

void write_event_log(std::ostream& out, std::span<const GateEvent> events) {
    out << "timestamp_s,kind\n";
    for (const auto& e : events) fmt::print(out, "{},{}\n", e.timestamp, to_string(e.kind));
}

}  // namespace lime
