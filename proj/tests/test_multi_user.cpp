#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lime/errors.hpp"
#include "lime/multi_user.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

namespace lime {
namespace {

const CameraIntrinsics kCam(1.0, 1000.0);
const InterpupillaryDistance kIpd(6.3);

TEST(EstimateBearing, LinearInOffset) {
    EXPECT_EQ(estimate_bearing({50.0, 0.0}, kCam), 0.0);
    EXPECT_EQ(estimate_bearing({50.0, 0.0}, CameraIntrinsics(0.3, 333.0)), 0.0);
    EXPECT_DOUBLE_EQ(estimate_bearing({50.0, 250.0}, kCam), 0.25);
    EXPECT_DOUBLE_EQ(estimate_bearing({50.0, -250.0}, kCam), -0.25);
    EXPECT_DOUBLE_EQ(estimate_bearing({50.0, 500.0}, kCam), 0.5);
    EXPECT_THROW(estimate_bearing({50.0, 500.01}, kCam), DomainError);
    EXPECT_THROW(estimate_bearing({50.0, -600.0}, kCam), DomainError);
}

TEST(LocateViewer, ComposesDistanceAndBearing) {
    const double e = project_eye_distance(40.0, kCam, kIpd);
    const auto pos = locate_viewer({e, 0.0}, kCam, kIpd);
    EXPECT_NEAR(pos.distance, 40.0, 40.0 * 1e-9);
    EXPECT_EQ(pos.bearing, 0.0);
    EXPECT_THROW(locate_viewer({0.0, 10.0}, kCam, kIpd), DomainError);
    const std::vector<EyeObservation> frame{{e, 0.0}, {0.0, 0.0}};
    EXPECT_THROW(locate_viewers(frame, kCam, kIpd), DomainError);
}

TEST(PairwiseDistance, KnownCases) {
    const UserPosition a{37.5, 0.3};
    EXPECT_EQ(pairwise_distance(a, a), 0.0);
    EXPECT_NEAR(pairwise_distance(UserPosition{3.0, 0.0}, UserPosition{4.0, kPi / 2.0}), 5.0, 1e-12);
    EXPECT_NEAR(pairwise_distance(UserPosition{1.0, 0.0}, UserPosition{1.0, kPi}), 2.0, 1e-12);
}

TEST(PairwiseDistance, MatchesCartesianOracle) {
    props::Gen g(21);
    for (int i = 0; i < 5000; ++i) {
        const UserPosition a{g.real(0.0, 200.0), g.real(-kPi, kPi)};
        const UserPosition b{g.real(0.0, 200.0), g.real(-kPi, kPi)};
        ASSERT_NEAR(pairwise_distance(a, b), oracle::cartesian_distance(a, b), 1e-9);
    }
}

TEST(PairwiseDistance, PositiveForDistinctPoints) {
    EXPECT_GT(pairwise_distance(UserPosition{50.0, 0.1}, UserPosition{50.0, 0.1 + 1e-12}), 0.0);
    EXPECT_GT(pairwise_distance(UserPosition{50.0, 0.1}, UserPosition{50.0 + 1e-12, 0.1}), 0.0);
}

TEST(ComputeCenter, SingleViewerIsItself) {
    const UserPosition v{73.0, -0.4};
    const auto c = compute_center(std::vector{v});
    EXPECT_NEAR(c.distance, 73.0, 1e-12);
    EXPECT_NEAR(c.bearing, -0.4, 1e-15);
}

TEST(ComputeCenter, SymmetricPairLiesOnAxis) {
    const double theta = 0.35;
    const auto c = compute_center(std::vector<UserPosition>{{60.0, theta}, {60.0, -theta}});
    EXPECT_NEAR(c.distance, 60.0 * std::cos(theta), 1e-12);
    EXPECT_EQ(c.bearing, 0.0);
}

TEST(ComputeCenter, RecoversFullQuadrant) {
    // Centroid behind the camera: a plain atan(q/p) would report ~0.
    const auto c = compute_center(std::vector<UserPosition>{{10.0, 2.5}, {10.0, 3.0}});
    EXPECT_NEAR(c.bearing, 2.75, 1e-12);
    const auto d = compute_center(std::vector<UserPosition>{{10.0, -2.5}, {10.0, -3.0}});
    EXPECT_NEAR(d.bearing, -2.75, 1e-12);
}

TEST(ComputeCenter, OriginHasCanonicalBearing) {
    const auto c = compute_center(std::vector<UserPosition>{{1.0, 0.0}, {1.0, kPi}});
    EXPECT_LT(c.distance, 1e-15);
    const auto exact = compute_center(std::vector<UserPosition>{{0.0, 1.0}, {0.0, -2.0}});
    EXPECT_EQ(exact.distance, 0.0);
    EXPECT_EQ(exact.bearing, 0.0);
}

TEST(ComputeCenter, EmptySetThrows) { EXPECT_THROW(compute_center(ViewerSet{}), EmptySetError); }

TEST(ComputeCenter, BeatsGridSearch) {
    props::Gen g(31);
    for (int i = 0; i < 20; ++i) {
        auto viewers = g.viewers(3, 1.0);
        while (viewers.size() < 3) viewers.push_back({g.real(10.0, 200.0), g.real(-1.0, 1.0)});
        const auto grid = oracle::grid_search_center(viewers);
        const double value = objective_value(viewers, compute_center(viewers));
        ASSERT_LE(value, grid.best_value * (1.0 + 1e-12));
        // The grid optimum sits within one cell of the returned center.
        const auto c = compute_center(viewers);
        const auto p = oracle::to_cartesian(c.distance, c.bearing);
        EXPECT_LE(std::hypot(p.x - grid.best_x, p.y - grid.best_y), grid.cell);
    }
}

TEST(ObjectiveValue, KnownCases) {
    const UserPosition v{42.0, 0.2};
    EXPECT_EQ(objective_value(std::vector{v}, CenterPosition{42.0, 0.2}), 0.0);
    EXPECT_NEAR(objective_value(std::vector<UserPosition>{{1.0, 0.0}, {1.0, kPi}}, CenterPosition{0.0, 0.0}), 2.0, 1e-12);
}

TEST(MultiUserProperties, CartesianMeanEquivalence) {
    const auto r = props::center_matches_cartesian_mean(5000, 41);
    EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(MultiUserProperties, Minimizer) {
    const auto r = props::center_minimizes_objective(1000, 100, 42);
    EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(MultiUserProperties, RotationEquivariance) {
    const auto r = props::center_rotation_equivariance(2000, 43);
    EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(MultiUserProperties, PermutationInvariance) {
    const auto r = props::center_permutation_invariance(2000, 44);
    EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(MultiUserProperties, TriangleInequality) {
    const auto r = props::pairwise_triangle_inequality(5000, 45);
    EXPECT_TRUE(r.ok()) << r.first_failure;
}

}  // namespace
}  // namespace lime
