#pragma once

#include <span>
#include <vector>

#include "lime/camera_geometry.hpp"

namespace lime {

/// Viewing center of a group of viewers, in the same polar frame as
/// UserPosition. A zero distance always carries a zero bearing.
struct CenterPosition {
    double distance = 0.0;
    double bearing = 0.0;

    friend bool operator==(const CenterPosition&, const CenterPosition&) = default;
};

using ViewerSet = std::vector<UserPosition>;

/// Signed bearing phi * O / W. Throws DomainError when |O| > W / 2.
double estimate_bearing(const EyeObservation& obs, const CameraIntrinsics& cam);

/// Distance and bearing of one detected face.
UserPosition locate_viewer(const EyeObservation& obs, const CameraIntrinsics& cam,
                           const InterpupillaryDistance& ipd);

/// Locates every face of a frame, all sharing one interpupillary distance.
ViewerSet locate_viewers(std::span<const EyeObservation> observations, const CameraIntrinsics& cam,
                         const InterpupillaryDistance& ipd);

/// Planar distance between two polar positions (law of cosines).
double pairwise_distance(const UserPosition& a, const UserPosition& b);
double pairwise_distance(const UserPosition& a, const CenterPosition& b);

/// Point minimizing the sum of squared distances to all viewers.
///
/// The minimizer is the mean of the viewers' Cartesian embeddings
/// (D cos theta, D sin theta), converted back to polar form with a
/// full-quadrant arc tangent. Sums run in input order. Throws EmptySetError
/// for an empty set.
CenterPosition compute_center(std::span<const UserPosition> viewers);

/// Sum over viewers of the squared distance to `candidate`, in cm^2.
double objective_value(std::span<const UserPosition> viewers, const CenterPosition& candidate);

}  // namespace lime
