#pragma once

// Angular camera model relating a viewer's metric distance to the pixel
// distance between their eyes in a captured frame.
//
// A frame of width W pixels spans a horizontal view angle fov_h, and pixel
// extent is taken to be proportional to subtended angle:
//
//     subtended / fov_h = E / W
//     subtended / 2     = atan(L / 2D)
//
// which gives D = L / (2 tan(fov_h * E / 2W)) for a viewer with
// interpupillary distance L observed with inter-eye pixel distance E.

namespace lime {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Horizontal field of view (radians) and frame width (pixels).
class CameraIntrinsics {
public:
    /// Throws DomainError unless 0 < fov_h < pi and frame_width > 0.
    CameraIntrinsics(double fov_h, double frame_width);

    static CameraIntrinsics from_degrees(double fov_h_deg, double frame_width) {
        return CameraIntrinsics(deg_to_rad(fov_h_deg), frame_width);
    }

    double fov_h() const { return fov_h_; }
    double frame_width() const { return frame_width_; }

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

private:
    double fov_h_;
    double frame_width_;
};

/// One detected face as reported by a face detector.
///
/// `eye_distance_px` is the distance between the two eyes in the frame;
/// `midpoint_offset_px` is the signed horizontal offset of the eye-pair
/// midpoint from the frame's vertical midline (positive to the right).
/// The offset bound |O| <= W/2 depends on the camera and is checked where
/// the observation is interpreted.
struct EyeObservation {
    double eye_distance_px = 0.0;
    double midpoint_offset_px = 0.0;

    friend bool operator==(const EyeObservation&, const EyeObservation&) = default;
};

/// Interpupillary distance in centimeters.
class InterpupillaryDistance {
public:
    static constexpr double kDefaultCm = 6.3;

    InterpupillaryDistance() = default;
    /// Throws DomainError unless cm > 0.
    explicit InterpupillaryDistance(double cm);

    double cm() const { return cm_; }

    friend bool operator==(const InterpupillaryDistance&, const InterpupillaryDistance&) = default;

private:
    double cm_ = kDefaultCm;
};

/// Polar position of a viewer relative to the camera: distance in cm and
/// signed bearing in radians from the screen normal.
struct UserPosition {
    double distance = 0.0;
    double bearing = 0.0;

    friend bool operator==(const UserPosition&, const UserPosition&) = default;
};

/// Face-screen distance in cm. Throws DomainError when E <= 0 or when
/// fov_h * E / 2W reaches pi/2.
double estimate_distance(const EyeObservation& obs, const CameraIntrinsics& cam,
                         const InterpupillaryDistance& ipd);

/// Fraction of the view angle the eye pair subtends, exactly E / W.
/// Requires 0 < E <= W.
double angular_fraction(const EyeObservation& obs, const CameraIntrinsics& cam);

/// Inverse of estimate_distance: the inter-eye pixel distance a viewer at
/// `distance_cm` produces. Throws DomainError when distance_cm <= 0 or the
/// eyes would not fit in the frame (E > W).
double project_eye_distance(double distance_cm, const CameraIntrinsics& cam,
                            const InterpupillaryDistance& ipd);

}  // namespace lime
