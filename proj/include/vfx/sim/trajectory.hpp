#pragma once

#include "vfx/core/math.hpp"
#include "vfx/scene/object.hpp"
#include "vfx/scene/timeline.hpp"

#include <span>
#include <vector>

namespace vfx {

struct PathSample {
    Vec3 position;
    Vec3 tangent;  // unit
};

/// Interpolating composite cubic Bezier through keypoints, reparameterized by
/// arc length. Interior control points follow Catmull-Rom; at a keypoint where
/// the path turns by more than kCornerAngle the tangent is zero, so the curve
/// meets the corner without overshooting either leg.
class BezierPath {
public:
    static constexpr double kCornerAngle = kPi / 3.0;
    static constexpr int kSamplesPerSegment = 256;

    explicit BezierPath(std::span<const Vec3> keypoints);  // throws TooFewPoints

    PathSample at(double t) const;  // t in [0,1], clamped
    double length() const { return cumulative_.back(); }
    /// Arc-length parameter of each keypoint (first 0, last 1).
    const std::vector<double>& keypoint_parameters() const { return key_t_; }

private:
    Vec3 eval(size_t seg, double u) const;
    Vec3 derivative(size_t seg, double u) const;

    std::vector<std::array<Vec3, 4>> segments_;
    std::vector<double> cumulative_;  // arc length at each sample, all segments
    std::vector<double> key_t_;
};

/// One-shot evaluation; see BezierPath.
PathSample bezier_path(std::span<const Vec3> keypoints, double t);

/// Per-frame transform following the path, heading (object +x) turned to the
/// tangent by yaw only. Scale is kept from the object. Throws TooFewPoints.
Timeline animate_trajectory(const SceneObject& obj, std::span<const Vec3> keypoints, int frames, double fps);

/// Union of per-object tracks and events. Throws ConflictingTrack when two
/// fragments animate the same object, InvariantViolation on mismatched frame
/// counts or rates. Fragments without tracks or events are ignored.
Timeline merge_timelines(std::span<const Timeline> fragments);

}  // namespace vfx
