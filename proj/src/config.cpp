// JSON experiment and scene configuration.

#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include <json.hpp>

#include "lime/errors.hpp"
#include "lime/harness.hpp"

namespace lime {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void expect_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

std::uint64_t unsigned_number(const json& obj, const char* key, const std::string& where, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

fs::path resolve(const fs::path& base_dir, const json& value, const std::string& where) {
    if (!value.is_string()) throw ConfigError(where + ": expected a path string");
    fs::path p = value.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    if (!fs::exists(p)) throw ConfigError(where + ": file not found: " + p.string());
    return p;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

double angle(const json& obj, const std::string& where, const char* deg_key, const char* rad_key, double fallback) {
    if (obj.contains(deg_key) && obj.contains(rad_key)) {
        throw ConfigError(where + ": give either " + deg_key + " or " + rad_key + ", not both");
    }
    if (obj.contains(deg_key)) return deg_to_rad(number(obj, deg_key, where, 0.0));
    return number(obj, rad_key, where, fallback);
}

std::array<double, 3> per_lighting(const json& obj, const std::string& where, std::array<double, 3> values) {
    expect_keys(obj, where, {"dark", "modest", "bright"});
    for (auto l : kAllLightings) {
        values[static_cast<std::size_t>(l)] = number(obj, std::string(to_string(l)).c_str(), where,
                                                     values[static_cast<std::size_t>(l)]);
    }
    return values;
}

json per_lighting_json(const std::array<double, 3>& values) {
    json out = json::object();
    for (auto l : kAllLightings) out[std::string(to_string(l))] = values[static_cast<std::size_t>(l)];
    return out;
}

SceneConfig parse_scene(const json& j, const fs::path& base_dir) {
    const std::string where = "scene";
    expect_keys(j, where, {"camera", "ipd_cm", "lighting", "frame_period_s", "viewers", "noise", "motion"});
    SceneConfig sc;
    try {
        if (j.contains("camera")) {
            const auto& c = j.at("camera");
            expect_keys(c, where + ".camera", {"fov_h_deg", "fov_h_rad", "frame_width_px"});
            sc.cam = CameraIntrinsics(angle(c, where + ".camera", "fov_h_deg", "fov_h_rad", sc.cam.fov_h()),
                                      number(c, "frame_width_px", where + ".camera", sc.cam.frame_width()));
        }
        sc.default_ipd = InterpupillaryDistance(number(j, "ipd_cm", where, sc.default_ipd.cm()));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
    if (j.contains("lighting")) {
        if (!j.at("lighting").is_string()) throw ConfigError("scene.lighting: expected a string");
        sc.lighting = parse_lighting(j.at("lighting").get<std::string>());
    }
    sc.frame_period_s = number(j, "frame_period_s", where, sc.frame_period_s);
    if (j.contains("viewers")) {
        const auto& list = j.at("viewers");
        if (!list.is_array()) throw ConfigError("scene.viewers: expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string w = where + ".viewers[" + std::to_string(i) + "]";
            const auto& v = list[i];
            expect_keys(v, w, {"distance_cm", "bearing_deg", "bearing_rad", "ipd_cm"});
            if (!v.contains("distance_cm")) throw ConfigError(w + ": distance_cm is required");
            SceneViewer viewer;
            viewer.position = UserPosition{number(v, "distance_cm", w, 0.0), angle(v, w, "bearing_deg", "bearing_rad", 0.0)};
            try {
                viewer.ipd = InterpupillaryDistance(number(v, "ipd_cm", w, sc.default_ipd.cm()));
            } catch (const DomainError& e) {
                throw ConfigError(w + ": " + e.what());
            }
            sc.viewers.push_back(viewer);
        }
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        expect_keys(n, where + ".noise", {"sigma_px"});
        if (n.contains("sigma_px")) {
            const auto sig = per_lighting(n.at("sigma_px"), where + ".noise.sigma_px", sc.noise.sigma_px);
            for (auto l : kAllLightings) sc.noise.set_sigma(l, sig[static_cast<std::size_t>(l)]);
        }
    }
    if (j.contains("motion")) {
        const auto& m = j.at("motion");
        const std::string w = where + ".motion";
        expect_keys(m, w, {"duration_s", "sample_rate_hz", "seed", "segments", "file"});
        auto& t = sc.trace;
        t.duration_s = number(m, "duration_s", w, t.duration_s);
        t.sample_rate_hz = number(m, "sample_rate_hz", w, t.sample_rate_hz);
        t.seed = unsigned_number(m, "seed", w, t.seed);
        if (m.contains("file")) t.file = resolve(base_dir, m.at("file"), w + ".file");
        if (m.contains("segments")) {
            const auto& segs = m.at("segments");
            if (!segs.is_array()) throw ConfigError(w + ".segments: expected a list");
            t.segments.clear();
            for (std::size_t i = 0; i < segs.size(); ++i) {
                const std::string ws = w + ".segments[" + std::to_string(i) + "]";
                expect_keys(segs[i], ws, {"start_s", "end_s", "amplitude", "frequency_hz"});
                t.segments.push_back(MotionSegment{number(segs[i], "start_s", ws, 0.0), number(segs[i], "end_s", ws, 0.0),
                                                   number(segs[i], "amplitude", ws, 0.0),
                                                   number(segs[i], "frequency_hz", ws, 0.0)});
            }
        }
    }
    try {
        (void)sc.scene();
    } catch (const OutOfFrame& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
    return sc;
}

DelayModel parse_delay(const json& j, const std::string& where, DelayModel d) {
    expect_keys(j, where, {"base_s", "jitter_mean_s"});
    d.base_s = number(j, "base_s", where, d.base_s);
    d.jitter_mean_s = number(j, "jitter_mean_s", where, d.jitter_mean_s);
    return d;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trial count must be at least 1");
    gate.validate();
    if (!(hysteresis_pt >= 0.0)) throw ConfigError("hysteresis_pt must be >= 0");
    if (accuracy_distances_cm.empty()) throw ConfigError("accuracy needs at least one distance");
    for (double d : accuracy_distances_cm) {
        try {
            project_eye_distance(d, scene.cam, scene.default_ipd);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("accuracy distance: ") + e.what());
        }
    }
    for (double t : calibration_targets) {
        if (!(t > 0.0)) throw ConfigError("calibration targets must be positive");
    }
    if (!(energy.base_power >= 0.0 && energy.camera_power >= 0.0)) throw ConfigError("energy coefficients must be >= 0");
    for (const auto* d : {&latency.capture, &latency.detection, &latency.policy}) {
        if (!(d->base_s >= 0.0 && d->jitter_mean_s >= 0.0)) throw ConfigError("latency delays must be >= 0");
    }
    if (latency.events < 1) throw ConfigError("latency needs at least one event");
    if (!(replay.alignment_tolerance_s >= 0.0)) throw ConfigError("alignment tolerance must be >= 0");
}

ExperimentConfig default_experiment_config() {
    ExperimentConfig config;
    auto& sc = config.scene;
    sc.viewers = {SceneViewer{UserPosition{40.0, 0.2}, {}}, SceneViewer{UserPosition{60.0, -0.3}, {}}};
    // `lime calibrate --trials 100000` on the default accuracy distances.
    sc.noise.set_sigma(Lighting::Dark, 1.033);
    sc.noise.set_sigma(Lighting::Modest, 1.190);
    sc.noise.set_sigma(Lighting::Bright, 1.935);
    // Motion during 12 s of the 60 s horizon.
    sc.trace.segments = {MotionSegment{10.0, 16.0, 3.0, 5.0}, MotionSegment{35.0, 41.0, 3.0, 5.0}};
    return config;
}

SceneConfig load_scene_config(const fs::path& path) {
    return parse_scene(read_json(path), path.parent_path());
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    const json j = read_json(path);
    const fs::path base_dir = path.parent_path();
    const std::string where = "config";
    expect_keys(j, where, {"scene_file", "seed", "trials", "output_dir", "gate", "policy", "accuracy", "calibration",
                           "noise_file", "energy", "latency", "replay"});

    ExperimentConfig config;
    if (!j.contains("scene_file")) throw ConfigError("config: scene_file is required");
    config.scene_file = resolve(base_dir, j.at("scene_file"), "config.scene_file");
    config.scene = load_scene_config(*config.scene_file);
    config.seed = unsigned_number(j, "seed", where, config.seed);
    config.trials = unsigned_number(j, "trials", where, config.trials);
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("config.output_dir: expected a path string");
        fs::path out = j.at("output_dir").get<std::string>();
        config.output_dir = out.is_relative() ? base_dir / out : out;
    }
    if (j.contains("gate")) {
        const auto& g = j.at("gate");
        expect_keys(g, "config.gate", {"motion_threshold", "window_s", "stationary_timeout_s", "min_capture_interval_s"});
        config.gate.motion_threshold = number(g, "motion_threshold", "config.gate", config.gate.motion_threshold);
        config.gate.window = number(g, "window_s", "config.gate", config.gate.window);
        config.gate.stationary_timeout = number(g, "stationary_timeout_s", "config.gate", config.gate.stationary_timeout);
        config.gate.min_capture_interval =
            number(g, "min_capture_interval_s", "config.gate", config.gate.min_capture_interval);
    }
    if (j.contains("policy")) {
        const auto& p = j.at("policy");
        expect_keys(p, "config.policy", {"breakpoints", "min_size_pt", "max_size_pt", "hysteresis_pt"});
        auto breakpoints = config.policy.breakpoints();
        if (p.contains("breakpoints")) {
            breakpoints.clear();
            for (const auto& b : p.at("breakpoints")) {
                if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
                    throw ConfigError("config.policy.breakpoints: expected [distance_cm, size_pt] pairs");
                }
                breakpoints.push_back({b[0].get<double>(), b[1].get<double>()});
            }
        }
        config.policy = FontPolicy(std::move(breakpoints), number(p, "min_size_pt", "config.policy", config.policy.min_size()),
                                   number(p, "max_size_pt", "config.policy", config.policy.max_size()));
        config.hysteresis_pt = number(p, "hysteresis_pt", "config.policy", config.hysteresis_pt);
    }
    if (j.contains("accuracy")) {
        const auto& a = j.at("accuracy");
        expect_keys(a, "config.accuracy", {"distances_cm", "lightings"});
        if (a.contains("distances_cm")) {
            config.accuracy_distances_cm.clear();
            for (const auto& d : a.at("distances_cm")) {
                if (!d.is_number()) throw ConfigError("config.accuracy.distances_cm: expected numbers");
                config.accuracy_distances_cm.push_back(d.get<double>());
            }
        }
        if (a.contains("lightings")) {
            config.accuracy_lightings.clear();
            for (const auto& l : a.at("lightings")) {
                if (!l.is_string()) throw ConfigError("config.accuracy.lightings: expected strings");
                config.accuracy_lightings.push_back(parse_lighting(l.get<std::string>()));
            }
        }
    }
    if (j.contains("calibration")) {
        const auto& c = j.at("calibration");
        expect_keys(c, "config.calibration", {"target_mse"});
        if (c.contains("target_mse")) {
            config.calibration_targets = per_lighting(c.at("target_mse"), "config.calibration.target_mse",
                                                      config.calibration_targets);
        }
    }
    if (j.contains("noise_file")) {
        config.noise_file = resolve(base_dir, j.at("noise_file"), "config.noise_file");
        const auto sigmas = load_noise_sigmas(*config.noise_file);
        for (auto l : kAllLightings) config.scene.noise.set_sigma(l, sigmas[static_cast<std::size_t>(l)]);
    }
    if (j.contains("energy")) {
        const auto& e = j.at("energy");
        expect_keys(e, "config.energy", {"base_power", "camera_power"});
        config.energy.base_power = number(e, "base_power", "config.energy", config.energy.base_power);
        config.energy.camera_power = number(e, "camera_power", "config.energy", config.energy.camera_power);
    }
    if (j.contains("latency")) {
        const auto& l = j.at("latency");
        expect_keys(l, "config.latency", {"events", "capture", "detection", "policy"});
        config.latency.events = unsigned_number(l, "events", "config.latency", config.latency.events);
        if (l.contains("capture")) config.latency.capture = parse_delay(l.at("capture"), "config.latency.capture", config.latency.capture);
        if (l.contains("detection")) {
            config.latency.detection = parse_delay(l.at("detection"), "config.latency.detection", config.latency.detection);
        }
        if (l.contains("policy")) config.latency.policy = parse_delay(l.at("policy"), "config.latency.policy", config.latency.policy);
    }
    if (j.contains("replay")) {
        const auto& r = j.at("replay");
        expect_keys(r, "config.replay", {"frames", "events", "alignment_tolerance_s"});
        if (r.contains("frames")) config.replay.frames = resolve(base_dir, r.at("frames"), "config.replay.frames");
        if (r.contains("events")) config.replay.events = resolve(base_dir, r.at("events"), "config.replay.events");
        config.replay.alignment_tolerance_s =
            number(r, "alignment_tolerance_s", "config.replay", config.replay.alignment_tolerance_s);
    }
    config.validate();
    return config;
}

std::array<double, 3> load_noise_sigmas(const fs::path& path) {
    const json j = read_json(path);
    if (!j.is_object() || !j.contains("sigma_px")) throw ConfigError(path.string() + ": missing sigma_px");
    std::array<double, 3> sigmas{};
    for (auto l : kAllLightings) {
        const auto key = std::string(to_string(l));
        if (!j.at("sigma_px").contains(key)) throw ConfigError(path.string() + ": missing sigma_px." + key);
    }
    return per_lighting(j.at("sigma_px"), path.string() + ".sigma_px", sigmas);
}

std::string config_to_json(const ExperimentConfig& config) {
    const auto& sc = config.scene;
    json viewers = json::array();
    for (const auto& v : sc.viewers) {
        viewers.push_back({{"distance_cm", v.position.distance}, {"bearing_rad", v.position.bearing}, {"ipd_cm", v.ipd.cm()}});
    }
    json segments = json::array();
    for (const auto& s : sc.trace.segments) {
        segments.push_back({{"start_s", s.start_s}, {"end_s", s.end_s}, {"amplitude", s.amplitude}, {"frequency_hz", s.frequency}});
    }
    json motion = {{"duration_s", sc.trace.duration_s},
                   {"sample_rate_hz", sc.trace.sample_rate_hz},
                   {"seed", sc.trace.seed},
                   {"segments", segments}};
    if (sc.trace.file) motion["file"] = sc.trace.file->generic_string();

    json breakpoints = json::array();
    for (const auto& b : config.policy.breakpoints()) breakpoints.push_back({b.distance_cm, b.size_pt});
    json lightings = json::array();
    for (auto l : config.accuracy_lightings) lightings.push_back(std::string(to_string(l)));
    auto delay = [](const DelayModel& d) { return json{{"base_s", d.base_s}, {"jitter_mean_s", d.jitter_mean_s}}; };

    json j = {
        {"scene",
         {{"camera", {{"fov_h_rad", sc.cam.fov_h()}, {"frame_width_px", sc.cam.frame_width()}}},
          {"ipd_cm", sc.default_ipd.cm()},
          {"lighting", std::string(to_string(sc.lighting))},
          {"frame_period_s", sc.frame_period_s},
          {"viewers", viewers},
          {"noise", {{"sigma_px", per_lighting_json(sc.noise.sigma_px)}}},
          {"motion", motion}}},
        {"seed", config.seed},
        {"trials", config.trials},
        {"gate",
         {{"motion_threshold", config.gate.motion_threshold},
          {"window_s", config.gate.window},
          {"stationary_timeout_s", config.gate.stationary_timeout},
          {"min_capture_interval_s", config.gate.min_capture_interval}}},
        {"policy",
         {{"breakpoints", breakpoints},
          {"min_size_pt", config.policy.min_size()},
          {"max_size_pt", config.policy.max_size()},
          {"hysteresis_pt", config.hysteresis_pt}}},
        {"accuracy", {{"distances_cm", config.accuracy_distances_cm}, {"lightings", lightings}}},
        {"calibration", {{"target_mse", per_lighting_json(config.calibration_targets)}}},
        {"energy", {{"base_power", config.energy.base_power}, {"camera_power", config.energy.camera_power}}},
        {"latency",
         {{"events", config.latency.events},
          {"capture", delay(config.latency.capture)},
          {"detection", delay(config.latency.detection)},
          {"policy", delay(config.latency.policy)}}},
        {"replay", {{"alignment_tolerance_s", config.replay.alignment_tolerance_s}}},
    };
    if (config.scene_file) j["scene_file"] = config.scene_file->generic_string();
    if (config.noise_file) j["noise_file"] = config.noise_file->generic_string();
    if (config.replay.frames) j["replay"]["frames"] = config.replay.frames->generic_string();
    if (config.replay.events) j["replay"]["events"] = config.replay.events->generic_string();
    return j.dump(2);
}

}  // namespace lime
