#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "lime/errors.hpp"
#include "lime/multi_user.hpp"
#include "lime/random.hpp"
#include "lime/scene_sim.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

namespace lime {
namespace {

const CameraIntrinsics kCam = CameraIntrinsics::from_degrees(60.0, 640.0);
const InterpupillaryDistance kIpd;

Scene single_viewer(double distance, double bearing, Lighting lighting = Lighting::Modest) {
    return Scene({SceneViewer{UserPosition{distance, bearing}, kIpd}}, kCam, lighting);
}

TEST(Random, ReferenceVectors) {
    // xoshiro256** from state {1, 2, 3, 4} and SplitMix64 from seed 0, both
    // checked against a straight transcription of the published algorithms.
    auto rng = Rng::from_state({1, 2, 3, 4});
    const std::uint64_t expected[] = {11520u, 0u, 1509978240u, 1215971899390074240u, 1216172134540287360u};
    for (auto e : expected) EXPECT_EQ(rng.next_u64(), e);
    EXPECT_EQ(mix_seed(0), 16294208416658607535u);
}

TEST(Random, NormalMoments) {
    Rng rng(2024);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(sum_sq / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Scene, RejectsOutOfFrameViewers) {
    EXPECT_THROW(single_viewer(1.0, 0.0), OutOfFrame);
    EXPECT_THROW(single_viewer(50.0, kCam.fov_h() / 2.0), OutOfFrame);
    EXPECT_NO_THROW(single_viewer(50.0, kCam.fov_h() / 2.0 - 1e-6));
}

TEST(Scene, FlagsOverlappingEyeSpans) {
    const Scene apart({SceneViewer{{40.0, 0.3}, kIpd}, SceneViewer{{60.0, -0.3}, kIpd}}, kCam, Lighting::Bright);
    EXPECT_TRUE(apart.overlapping_viewers().empty());
    const Scene close({SceneViewer{{40.0, 0.01}, kIpd}, SceneViewer{{60.0, -0.01}, kIpd}}, kCam, Lighting::Bright);
    ASSERT_EQ(close.overlapping_viewers().size(), 1u);
}

TEST(RenderFrame, NoiseFreeInverse) {
    const auto frame = render_frame(single_viewer(50.0, 0.0), NoiseModel::uniform(0.0, 1), 0);
    ASSERT_EQ(frame.observations.size(), 1u);
    const auto pos = locate_viewer(frame.observations[0], kCam, kIpd);
    EXPECT_NEAR(pos.distance, 50.0, 50.0 * 1e-9);
    EXPECT_EQ(pos.bearing, 0.0);
    EXPECT_FALSE(frame.any_clamped());
}

TEST(RenderFrame, NoiseFreeTwoViewers) {
    const Scene scene({SceneViewer{{40.0, 0.2}, kIpd}, SceneViewer{{60.0, -0.3}, kIpd}}, kCam, Lighting::Dark, 0.1);
    const auto frame = render_frame(scene, NoiseModel::uniform(0.0, 3), 7);
    EXPECT_DOUBLE_EQ(frame.timestamp, 0.7);
    const auto a = locate_viewer(frame.observations[0], kCam, kIpd);
    const auto b = locate_viewer(frame.observations[1], kCam, kIpd);
    EXPECT_NEAR(a.distance, 40.0, 40.0 * 1e-9);
    EXPECT_NEAR(a.bearing, 0.2, 0.2 * 1e-9);
    EXPECT_NEAR(b.distance, 60.0, 60.0 * 1e-9);
    EXPECT_NEAR(b.bearing, -0.3, 0.3 * 1e-9);
}

TEST(RenderFrame, DeterministicPerFrameIndex) {
    const auto scene = single_viewer(50.0, 0.1);
    const auto noise = NoiseModel::uniform(2.0, 99);
    const auto a = render_frame(scene, noise, 12);
    const auto b = render_frame(scene, noise, 12);
    const auto c = render_frame(scene, noise, 13);
    EXPECT_EQ(a.observations, b.observations);
    EXPECT_NE(a.observations, c.observations);
}

TEST(RenderFrame, UsesLightingSigma) {
    NoiseModel noise;
    noise.seed = 5;
    noise.set_sigma(Lighting::Bright, 3.0);
    const auto dark = render_frame(single_viewer(50.0, 0.0, Lighting::Dark), noise, 0);
    const auto bright = render_frame(single_viewer(50.0, 0.0, Lighting::Bright), noise, 0);
    const double ideal = project_eye_distance(50.0, kCam, kIpd);
    EXPECT_EQ(dark.observations[0].eye_distance_px, ideal);
    EXPECT_NE(bright.observations[0].eye_distance_px, ideal);
}

TEST(RenderFrame, ClampsAndFlagsInvalidNoise) {
    // A far viewer has a tiny eye distance; large noise pushes it below 0.1 px.
    const auto scene = single_viewer(2000.0, 0.0);
    const auto noise = NoiseModel::uniform(10.0, 17);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        const auto frame = render_frame(scene, noise, i);
        const auto& obs = frame.observations[0];
        EXPECT_GE(obs.eye_distance_px, kMinEyeDistancePx);
        if (frame.clamped[0]) {
            ++flagged;
        } else {
            EXPECT_GT(obs.eye_distance_px, kMinEyeDistancePx);
        }
    }
    EXPECT_GT(flagged, 50u);
}

// With eye-distance noise sigma, the mean estimate sits above the true
// distance by about sigma^2 / 2 * D''(E), where D(E) = (L / 2) cot(aE) and
// a = fov / 2W, so D''(E) = L a^2 csc^2(aE) cot(aE).
TEST(RenderFrame, MonteCarloMeanMatchesSecondOrderBias) {
    const double sigma = 2.0;
    const auto scene = single_viewer(50.0, 0.0);
    const auto noise = NoiseModel::uniform(sigma, 2718);
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto frame = render_frame(scene, noise, static_cast<std::size_t>(i));
        ASSERT_FALSE(frame.any_clamped());
        const double d = estimate_distance(frame.observations[0], kCam, kIpd);
        sum += d;
        sum_sq += d * d;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));

    const double a = kCam.fov_h() / (2.0 * kCam.frame_width());
    const double e = (1.0 / a) * std::atan(kIpd.cm() / (2.0 * 50.0));
    const double x = a * e;
    const double second_derivative = kIpd.cm() * a * a * std::cos(x) / std::pow(std::sin(x), 3);
    const double expected = 50.0 + 0.5 * sigma * sigma * second_derivative;
    EXPECT_NEAR(mean, expected, 3.0 * sd / std::sqrt(n));
}

TEST(RenderFrame, MseIncreasesWithSigma) {
    const SceneFamily family{kCam, kIpd, {50.0}};
    double previous = -1.0;
    for (double sigma : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        const auto est = simulate_distance_mse(family, sigma, 10000, 8);
        EXPECT_GE(est.mse, previous) << "sigma " << sigma;
        previous = est.mse;
    }
}

TEST(SynthesizeTrace, RestTrace) {
    const auto trace = synthesize_accel_trace({}, 10.0, 50.0, 1);
    ASSERT_EQ(trace.size(), 500u);
    for (const auto& s : trace) EXPECT_LT(gravity_deviation(s), 0.05);
    EXPECT_DOUBLE_EQ(trace[499].timestamp, 9.98);
}

TEST(SynthesizeTrace, SegmentPeakMatchesAmplitude) {
    const std::vector<MotionSegment> segs{{2.0, 4.0, 3.0, 5.0}, {6.0, 6.5, 1.0, 2.0}};
    const auto trace = synthesize_accel_trace(segs, 10.0, 50.0, 2);
    double peak1 = 0.0, peak2 = 0.0;
    for (const auto& s : trace) {
        const double dev = gravity_deviation(s);
        if (s.timestamp >= 2.0 && s.timestamp < 4.0) peak1 = std::max(peak1, dev);
        else if (s.timestamp >= 6.0 && s.timestamp < 6.5) peak2 = std::max(peak2, dev);
        else EXPECT_LT(dev, 0.05) << s.timestamp;
    }
    EXPECT_NEAR(peak1, 3.0, 0.15);
    EXPECT_NEAR(peak2, 1.0, 0.05);

    GateConfig cfg;
    cfg.motion_threshold = 1.0;
    std::vector<MotionSample> inside;
    for (const auto& s : trace) {
        if (s.timestamp >= 2.0 && s.timestamp < 4.0) inside.push_back(s);
    }
    EXPECT_TRUE(detect_motion(inside, cfg));
}

TEST(SynthesizeTrace, RejectsBadSegments) {
    const std::vector<MotionSegment> overlap{{1.0, 3.0, 1.0, 1.0}, {2.0, 4.0, 1.0, 1.0}};
    EXPECT_THROW(synthesize_accel_trace(overlap, 10.0, 50.0, 1), SpecError);
    const std::vector<MotionSegment> beyond{{8.0, 12.0, 1.0, 1.0}};
    EXPECT_THROW(synthesize_accel_trace(beyond, 10.0, 50.0, 1), SpecError);
    const std::vector<MotionSegment> empty{{3.0, 3.0, 1.0, 1.0}};
    EXPECT_THROW(synthesize_accel_trace(empty, 10.0, 50.0, 1), SpecError);
    EXPECT_THROW(synthesize_accel_trace({}, 10.0, 0.0, 1), SpecError);
}

TEST(SynthesizeTrace, ByteIdenticalAcrossRuns) {
    const std::vector<MotionSegment> segs{{10.0, 16.0, 3.0, 5.0}, {35.0, 41.0, 3.0, 5.0}};
    std::ostringstream a, b;
    write_trace(a, synthesize_accel_trace(segs, 60.0, 50.0, 42));
    write_trace(b, synthesize_accel_trace(segs, 60.0, 50.0, 42));
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream c;
    write_trace(c, synthesize_accel_trace(segs, 60.0, 50.0, 43));
    EXPECT_NE(a.str(), c.str());
}

TEST(CalibrateNoise, VanishingTargetGivesVanishingSigma) {
    const SceneFamily family{kCam, kIpd, {30.0, 50.0, 70.0}};
    const auto tiny = calibrate_noise(1e-6, family, 2000, 1);
    EXPECT_LT(tiny.sigma_px, 0.01);
    EXPECT_THROW(calibrate_noise(0.0, family, 2000, 1), DomainError);
    EXPECT_THROW(calibrate_noise(1e12, family, 2000, 1), ConvergenceError);
}

TEST(CalibrateNoise, OrderedTargetsGiveOrderedSigmas) {
    const SceneFamily family{kCam, kIpd, {30.0, 40.0, 50.0, 60.0, 70.0}};
    const auto dark = calibrate_noise(0.6761, family, 20000, 9);
    const auto modest = calibrate_noise(0.8976, family, 20000, 9);
    const auto bright = calibrate_noise(2.3878, family, 20000, 9);
    EXPECT_LT(dark.sigma_px, modest.sigma_px);
    EXPECT_LT(modest.sigma_px, bright.sigma_px);
}

TEST(CalibrateNoise, ResimulatedMseStaysWithinTenPercent) {
    const SceneFamily family{kCam, kIpd, {30.0, 40.0, 50.0, 60.0, 70.0}};
    const auto cal = calibrate_noise(0.8976, family, 100000, 10);
    const auto check = simulate_distance_mse(family, cal.sigma_px, 100000, 11);
    EXPECT_GE(check.mse, 0.808);
    EXPECT_LE(check.mse, 0.987);
}

TEST(FrameLog, RoundTripAndValidation) {
    const Scene scene({SceneViewer{{40.0, 0.2}, kIpd}, SceneViewer{{60.0, -0.3}, kIpd}}, kCam, Lighting::Modest, 0.1);
    std::vector<DetectionFrame> frames;
    for (std::size_t i = 0; i < 5; ++i) frames.push_back(render_frame(scene, NoiseModel::uniform(1.5, 4), i));
    std::stringstream buffer;
    write_frame_log(buffer, frames);
    const auto parsed = read_frame_log(buffer);
    ASSERT_EQ(parsed.size(), frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        EXPECT_EQ(parsed[i].index, frames[i].index);
        EXPECT_EQ(parsed[i].timestamp, frames[i].timestamp);
        EXPECT_EQ(parsed[i].observations, frames[i].observations);
        EXPECT_EQ(parsed[i].clamped, frames[i].clamped);
    }

    std::istringstream skipped_viewer("0,0,0,50,0,0\n0,0,2,50,0,0\n");
    EXPECT_THROW(read_frame_log(skipped_viewer), ParseError);
    std::istringstream bad_flag("0,0,0,50,0,2\n");
    EXPECT_THROW(read_frame_log(bad_flag), ParseError);
}

}  // namespace
}  // namespace lime
