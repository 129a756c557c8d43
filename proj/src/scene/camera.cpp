#include "vfx/scene/camera.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/text.hpp"
#include "vfx/scene/gaussians.hpp"

namespace vfx {

CameraView CameraView::supersampled(int factor) const {
    CameraView c = *this;
    Intrinsics& k = c.intrinsics;
    k.fx *= factor;
    k.fy *= factor;
    k.cx *= factor;
    k.cy *= factor;
    k.width *= factor;
    k.height *= factor;
    return c;
}

void validate_camera(const CameraView& cam, std::string_view what) {
    const Intrinsics& k = cam.intrinsics;
    const auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::InvariantViolation, std::string(what) + ": " + msg);
    };
    if (!(k.fx > 0) || !(k.fy > 0)) fail("focal lengths must be positive");
    if (k.width <= 0 || k.height <= 0) fail("image size must be positive");
    if (!(k.cx > 0 && k.cx < k.width) || !(k.cy > 0 && k.cy < k.height))
        fail("principal point outside the image");
    const Mat3& r = cam.world_from_camera.rotation;
    if (!((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-6) ||
        !(r.determinant() > 0))
        fail("pose rotation is not orthonormal");
    if (!cam.world_from_camera.translation.allFinite()) fail("pose translation is not finite");
}

void validate_gaussians(const GaussianCloud& cloud, std::string_view what) {
    for (size_t i = 0; i < cloud.size(); ++i) {
        const Gaussian& g = cloud[i];
        const auto fail = [&](const std::string& msg) {
            throw Error(ErrorKind::InvariantViolation,
                        std::string(what) + ": row " + std::to_string(i) + ": " + msg);
        };
        if (std::abs(g.rotation.norm() - 1.0) > 1e-6) fail("quaternion is not unit-norm");
        if (!(g.scale.minCoeff() > 0)) fail("scales must be positive");
        if (!(g.opacity >= 0.0 && g.opacity <= 1.0)) fail("opacity " + fmt_num(g.opacity) + " outside [0,1]");
        if (!g.center.allFinite()) fail("center is not finite");
    }
}

std::optional<PixelProjection> project(const CameraView& cam, const Vec3& world_point) {
    const Vec3 p = cam.world_from_camera.apply_inverse(world_point);
    if (!(p.z() > 0)) return std::nullopt;
    const Intrinsics& k = cam.intrinsics;
    return PixelProjection{Vec2(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy), p.z()};
}

Ray unproject_pixel(const CameraView& cam, const Vec2& pixel) {
    const Intrinsics& k = cam.intrinsics;
    if (!(pixel.x() >= 0 && pixel.x() <= k.width && pixel.y() >= 0 && pixel.y() <= k.height))
        throw Error(ErrorKind::OutOfBounds,
                    "pixel (" + fmt_num(pixel.x()) + ", " + fmt_num(pixel.y()) + ")");
    const Vec3 d_cam((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy, 1.0);
    return {cam.world_from_camera.translation,
            (cam.world_from_camera.rotation * d_cam).normalized()};
}

CameraView look_at(const Vec3& eye, const Vec3& target, const Intrinsics& intrinsics) {
    const Vec3 z = (target - eye).normalized();
    Vec3 x = z.cross(Vec3::UnitZ());
    if (x.norm() < 1e-9) x = Vec3::UnitX();
    x.normalize();
    const Vec3 y = z.cross(x);  // points down in the image
    CameraView cam;
    cam.intrinsics = intrinsics;
    cam.world_from_camera.rotation.col(0) = x;
    cam.world_from_camera.rotation.col(1) = y;
    cam.world_from_camera.rotation.col(2) = z;
    cam.world_from_camera.translation = eye;
    return cam;
}

}  // namespace vfx
