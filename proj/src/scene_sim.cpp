#include "lime/scene_sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "lime/errors.hpp"
#include "lime/random.hpp"
#include "line_io.hpp"

namespace lime {

std::string_view to_string(Lighting lighting) {
    switch (lighting) {
        case Lighting::Dark: return "dark";
        case Lighting::Modest: return "modest";
        case Lighting::Bright: return "bright";
    }
    return "?";
}

Lighting parse_lighting(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "dark") return Lighting::Dark;
    if (lower == "modest") return Lighting::Modest;
    if (lower == "bright") return Lighting::Bright;
    throw ConfigError("unknown lighting level '" + std::string(text) + "'");
}

Scene::Scene(std::vector<SceneViewer> viewers, CameraIntrinsics cam, Lighting lighting, double frame_period_s)
    : viewers_(std::move(viewers)), cam_(cam), lighting_(lighting), frame_period_(frame_period_s) {
    if (!(frame_period_s > 0.0)) throw ConfigError("scene frame period must be positive");
    for (std::size_t i = 0; i < viewers_.size(); ++i) {
        const auto& v = viewers_[i];
        try {
            project_eye_distance(v.position.distance, cam_, v.ipd);
        } catch (const DomainError& e) {
            throw OutOfFrame(fmt::format("viewer {}: {}", i, e.what()));
        }
        if (!(std::abs(v.position.bearing) < cam_.fov_h() / 2.0)) {
            throw OutOfFrame(fmt::format("viewer {}: bearing {} rad outside the half field of view {}", i,
                                         v.position.bearing, cam_.fov_h() / 2.0));
        }
    }
}

EyeObservation Scene::ideal_observation(std::size_t i) const {
    const auto& v = viewers_.at(i);
    return EyeObservation{project_eye_distance(v.position.distance, cam_, v.ipd),
                          cam_.frame_width() * v.position.bearing / cam_.fov_h()};
}

std::vector<std::pair<std::size_t, std::size_t>> Scene::overlapping_viewers() const {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < viewers_.size(); ++i) {
        const auto a = ideal_observation(i);
        for (std::size_t j = i + 1; j < viewers_.size(); ++j) {
            const auto b = ideal_observation(j);
            const double gap = std::abs(a.midpoint_offset_px - b.midpoint_offset_px);
            if (gap < (a.eye_distance_px + b.eye_distance_px) / 2.0) pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

void NoiseModel::set_sigma(Lighting lighting, double value) {
    if (!(value >= 0.0)) throw ConfigError("noise sigma must be >= 0");
    sigma_px[static_cast<std::size_t>(lighting)] = value;
}

NoiseModel NoiseModel::uniform(double sigma, std::uint64_t seed) {
    NoiseModel m;
    m.seed = seed;
    for (auto l : kAllLightings) m.set_sigma(l, sigma);
    return m;
}

bool DetectionFrame::any_clamped() const {
    return std::find(clamped.begin(), clamped.end(), true) != clamped.end();
}

DetectionFrame render_frame(const Scene& scene, const NoiseModel& noise, std::size_t frame_index) {
    const double sigma = noise.sigma(scene.lighting());
    const double width = scene.camera().frame_width();
    Rng rng(derive_seed(noise.seed, frame_index));

    DetectionFrame frame;
    frame.index = frame_index;
    frame.timestamp = static_cast<double>(frame_index) * scene.frame_period();
    for (std::size_t i = 0; i < scene.viewers().size(); ++i) {
        auto obs = scene.ideal_observation(i);
        bool clamped = false;
        if (sigma > 0.0) {
            obs.eye_distance_px += sigma * rng.normal();
            obs.midpoint_offset_px += sigma * rng.normal();
            if (obs.eye_distance_px < kMinEyeDistancePx) {
                obs.eye_distance_px = kMinEyeDistancePx;
                clamped = true;
            } else if (obs.eye_distance_px > width) {
                obs.eye_distance_px = width;
                clamped = true;
            }
            if (std::abs(obs.midpoint_offset_px) > width / 2.0) {
                obs.midpoint_offset_px = std::copysign(width / 2.0, obs.midpoint_offset_px);
                clamped = true;
            }
        }
        frame.observations.push_back(obs);
        frame.clamped.push_back(clamped);
    }
    return frame;
}

std::vector<MotionSample> synthesize_accel_trace(std::span<const MotionSegment> segments, double duration_s,
                                                 double sample_rate_hz, std::uint64_t seed) {
    if (!(sample_rate_hz > 0.0)) throw SpecError("sample rate must be positive");
    if (!(duration_s >= 0.0)) throw SpecError("duration must be non-negative");

    std::vector<MotionSegment> sorted(segments.begin(), segments.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const MotionSegment& a, const MotionSegment& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& s = sorted[i];
        if (!(s.start_s >= 0.0 && s.start_s < s.end_s && s.end_s <= duration_s)) {
            throw SpecError(fmt::format("segment [{}, {}] is empty or outside [0, {}]", s.start_s, s.end_s, duration_s));
        }
        if (!(s.amplitude >= 0.0) || !(s.frequency > 0.0)) {
            throw SpecError("segment amplitude must be >= 0 and frequency > 0");
        }
        if (i > 0 && s.start_s < sorted[i - 1].end_s) {
            throw SpecError(fmt::format("segments [{}, {}] and [{}, {}] overlap", sorted[i - 1].start_s,
                                        sorted[i - 1].end_s, s.start_s, s.end_s));
        }
    }

    // Per-axis noise bound; sqrt(3) * 0.005 keeps rest deviation under 0.01.
    constexpr double kAxisNoise = 0.005;
    const auto count = static_cast<std::size_t>(std::floor(duration_s * sample_rate_hz + 1e-9));
    Rng rng(seed);
    std::vector<MotionSample> trace;
    trace.reserve(count);
    std::vector<double> first_sample(sorted.size(), -1.0);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / sample_rate_hz;
        double magnitude = kStandardGravity;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const auto& s = sorted[i];
            if (t >= s.start_s && t < s.end_s) {
                if (first_sample[i] < 0.0) first_sample[i] = t;
                magnitude += s.amplitude * std::cos(2.0 * kPi * s.frequency * (t - first_sample[i]));
                break;
            }
        }
        MotionSample sample;
        sample.timestamp = t;
        sample.accel = {rng.uniform(-kAxisNoise, kAxisNoise), rng.uniform(-kAxisNoise, kAxisNoise),
                        magnitude + rng.uniform(-kAxisNoise, kAxisNoise)};
        trace.push_back(sample);
    }
    return trace;
}

MseEstimate simulate_distance_mse(const SceneFamily& family, double sigma_px, std::size_t trials,
                                  std::uint64_t seed) {
    if (family.distances_cm.empty()) throw ConfigError("scene family has no distances");
    std::vector<double> ideal;
    for (double d : family.distances_cm) ideal.push_back(project_eye_distance(d, family.cam, family.ipd));

    const double width = family.cam.frame_width();
    double sum = 0.0;
    double sum_sq = 0.0;
    MseEstimate out;
    for (std::size_t k = 0; k < trials; ++k) {
        const std::size_t which = k % ideal.size();
        Rng rng(derive_seed(seed, k));
        const double e = ideal[which] + sigma_px * rng.normal();
        if (e < kMinEyeDistancePx || e > width) {
            ++out.clamped;
            continue;
        }
        const double err = estimate_distance(EyeObservation{e, 0.0}, family.cam, family.ipd) -
                           family.distances_cm[which];
        const double sq = err * err;
        sum += sq;
        sum_sq += sq * sq;
        ++out.trials;
    }
    if (out.trials == 0) return out;
    const auto n = static_cast<double>(out.trials);
    out.mse = sum / n;
    const double var = out.trials > 1 ? std::max(0.0, (sum_sq - n * out.mse * out.mse) / (n - 1.0)) : 0.0;
    out.std_error = std::sqrt(var / n);
    return out;
}

Calibration calibrate_noise(double target_mse, const SceneFamily& family, std::size_t trials,
                            std::uint64_t seed) {
    if (!(target_mse > 0.0)) throw DomainError("calibration target MSE must be positive");
    if (trials == 0) throw ConfigError("calibration needs at least one trial");
    constexpr double kMaxSigma = 50.0;
    constexpr double kRelTol = 1e-3;
    constexpr int kMaxIterations = 200;

    const double at_max = simulate_distance_mse(family, kMaxSigma, trials, seed).mse;
    if (!(at_max >= target_mse)) {
        throw ConvergenceError(fmt::format("target MSE {} not reached at sigma {} px (MSE {})", target_mse,
                                           kMaxSigma, at_max));
    }
    double lo = 0.0;
    double hi = kMaxSigma;
    Calibration result{hi, at_max, 0};
    for (int it = 1; it <= kMaxIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double mse = simulate_distance_mse(family, mid, trials, seed).mse;
        result = Calibration{mid, mse, it};
        if (std::abs(mse - target_mse) <= kRelTol * target_mse) return result;
        (mse < target_mse ? lo : hi) = mid;
        if (hi - lo < 1e-12) return result;
    }
    throw ConvergenceError(fmt::format("calibration for MSE {} did not converge", target_mse));
}

void write_frame_log(std::ostream& out, std::span<const DetectionFrame> frames) {
    out << "frame,timestamp_s,viewer_index,E_px,O_px,clamped\n";
    for (const auto& f : frames) {
        for (std::size_t i = 0; i < f.observations.size(); ++i) {
            const auto& o = f.observations[i];
            fmt::print(out, "{},{},{},{},{},{}\n", f.index, f.timestamp, i, o.eye_distance_px, o.midpoint_offset_px,
                       f.clamped[i] ? 1 : 0);
        }
    }
}

std::vector<DetectionFrame> read_frame_log(std::istream& in) {
    std::vector<DetectionFrame> frames;
    detail::for_each_record(in, [&](const auto& fields, std::size_t line_no) {
        if (fields.size() != 6) {
            throw ParseError(fmt::format("line {}: expected frame,timestamp_s,viewer_index,E_px,O_px,clamped", line_no));
        }
        const double index = detail::parse_double_or_throw(fields[0], line_no);
        const double timestamp = detail::parse_double_or_throw(fields[1], line_no);
        const double viewer = detail::parse_double_or_throw(fields[2], line_no);
        const double clamped = detail::parse_double_or_throw(fields[5], line_no);
        if (index < 0 || viewer < 0 || std::floor(index) != index || std::floor(viewer) != viewer) {
            throw ParseError(fmt::format("line {}: frame and viewer indices must be non-negative integers", line_no));
        }
        if (clamped != 0.0 && clamped != 1.0) throw ParseError(fmt::format("line {}: clamped must be 0 or 1", line_no));
        const auto frame_index = static_cast<std::size_t>(index);
        if (frames.empty() || frames.back().index != frame_index) {
            if (!frames.empty() && frame_index < frames.back().index) {
                throw ParseError(fmt::format("line {}: frame indices must be nondecreasing", line_no));
            }
            frames.push_back(DetectionFrame{frame_index, timestamp, {}, {}});
        }
        auto& frame = frames.back();
        if (static_cast<std::size_t>(viewer) != frame.observations.size()) {
            throw ParseError(fmt::format("line {}: viewer indices must count up from 0 within a frame", line_no));
        }
        frame.observations.push_back(EyeObservation{detail::parse_double_or_throw(fields[3], line_no),
                                                    detail::parse_double_or_throw(fields[4], line_no)});
        frame.clamped.push_back(clamped == 1.0);
    });
    return frames;
}

}  // namespace lime
