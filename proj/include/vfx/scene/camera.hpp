#pragma once

#include "vfx/core/math.hpp"

#include <optional>
#include <string>

namespace vfx {

struct Intrinsics {
    double fx = 1, fy = 1, cx = 0.5, cy = 0.5;
    int width = 1, height = 1;
};

/// Pinhole camera. Camera frame: x right, y down, z forward. Pixel (i, j)
/// covers [i, i+1) x [j, j+1); its center is (i + 0.5, j + 0.5).
struct CameraView {
    Intrinsics intrinsics;
    Rigid world_from_camera;
    std::string frame_path;
    std::string mask_path;

    Vec3 center() const { return world_from_camera.translation; }
    Vec3 forward() const { return world_from_camera.rotation.col(2); }

    /// Same view at `factor` times the resolution.
    CameraView supersampled(int factor) const;
};

void validate_camera(const CameraView& cam, std::string_view what);

struct PixelProjection {
    Vec2 pixel;
    double depth;  // camera-frame z, meters
};

/// nullopt when the point is behind the camera (z <= 0).
std::optional<PixelProjection> project(const CameraView& cam, const Vec3& world_point);

/// Ray through a continuous pixel position; throws OutOfBounds outside [0,w] x [0,h].
Ray unproject_pixel(const CameraView& cam, const Vec2& pixel);

/// Ray through the center of integer pixel (x, y); no bounds check.
inline Ray pixel_center_ray(const CameraView& cam, int x, int y) {
    const Intrinsics& k = cam.intrinsics;
    const Vec3 d_cam((x + 0.5 - k.cx) / k.fx, (y + 0.5 - k.cy) / k.fy, 1.0);
    return {cam.world_from_camera.translation,
            (cam.world_from_camera.rotation * d_cam).normalized()};
}

/// Camera-frame depth of a point at distance t along a pixel ray.
inline double ray_depth(const CameraView& cam, const Ray& ray, double t) {
    return t * cam.forward().dot(ray.direction);
}

/// Camera at `eye` looking at `target` with world +z as up.
CameraView look_at(const Vec3& eye, const Vec3& target, const Intrinsics& intrinsics);

}  // namespace vfx
