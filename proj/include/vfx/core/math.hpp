#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vfx {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// World up axis. Gravity and support tests use it.
inline Vec3 up_axis() { return Vec3::UnitZ(); }

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();

    Vec3 at(double t) const { return origin + t * direction; }
};

struct Aabb {
    Vec3 lo = Vec3::Constant(kInf);
    Vec3 hi = Vec3::Constant(-kInf);

    void extend(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    bool valid() const { return (lo.array() <= hi.array()).all(); }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
    bool contains(const Aabb& b) const {
        return (lo.array() <= b.lo.array()).all() && (hi.array() >= b.hi.array()).all();
    }
    bool contains(const Vec3& p) const {
        return (lo.array() <= p.array()).all() && (hi.array() >= p.array()).all();
    }
    double surface_area() const {
        if (!valid()) return 0.0;
        const Vec3 e = extent();
        return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
    }
    int longest_axis() const {
        const Vec3 e = extent();
        if (e.x() >= e.y() && e.x() >= e.z()) return 0;
        return e.y() >= e.z() ? 1 : 2;
    }
    // Squared distance from p to the box (0 inside).
    double distance2(const Vec3& p) const {
        const Vec3 d = (lo - p).cwiseMax(Vec3::Zero()).cwiseMax(p - hi);
        return d.squaredNorm();
    }
    // Slab test. Returns entry distance in [tmin, tmax] or false.
    bool intersect(const Vec3& origin, const Vec3& inv_dir, double tmin, double tmax,
                   double& t_enter) const {
        for (int a = 0; a < 3; ++a) {
            double t0 = (lo[a] - origin[a]) * inv_dir[a];
            double t1 = (hi[a] - origin[a]) * inv_dir[a];
            if (t0 > t1) std::swap(t0, t1);
            // NaN from 0*inf falls through both comparisons.
            if (t0 > tmin) tmin = t0;
            if (t1 < tmax) tmax = t1;
            if (tmin > tmax) return false;
        }
        t_enter = tmin;
        return true;
    }
};

/// Rigid transform (rotation matrix + translation).
struct Rigid {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
    Rigid inverse() const {
        Rigid r;
        r.rotation = rotation.transpose();
        r.translation = -(r.rotation * translation);
        return r;
    }
    Mat4 matrix() const {
        Mat4 m = Mat4::Identity();
        m.topLeftCorner<3, 3>() = rotation;
        m.topRightCorner<3, 1>() = translation;
        return m;
    }
};

/// Similarity transform p -> scale * R p + t.
struct Similarity {
    Quat rotation = Quat::Identity();
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
    Vec3 apply_vector(const Vec3& v) const { return scale * (rotation * v); }
    Vec3 apply_inverse(const Vec3& p) const {
        return (rotation.conjugate() * (p - translation)) / scale;
    }

    Similarity inverse() const {
        Similarity r;
        r.rotation = rotation.conjugate();
        r.scale = 1.0 / scale;
        r.translation = -(r.scale * (r.rotation * translation));
        return r;
    }

    // (a * b).apply(p) == a.apply(b.apply(p))
    friend Similarity operator*(const Similarity& a, const Similarity& b) {
        Similarity r;
        r.rotation = (a.rotation * b.rotation).normalized();
        r.scale = a.scale * b.scale;
        r.translation = a.apply(b.translation);
        return r;
    }

    Mat4 matrix() const {
        Mat4 m = Mat4::Identity();
        m.topLeftCorner<3, 3>() = scale * rotation.toRotationMatrix();
        m.topRightCorner<3, 1>() = translation;
        return m;
    }

    static Similarity from_matrix(const Mat4& m) {
        Similarity s;
        Mat3 a = m.topLeftCorner<3, 3>();
        s.scale = std::cbrt(a.determinant());
        if (!(s.scale > 0)) s.scale = a.col(0).norm();
        if (s.scale > 0) a /= s.scale;
        s.rotation = Quat(a).normalized();
        s.translation = m.topRightCorner<3, 1>();
        return s;
    }

    friend bool operator==(const Similarity& a, const Similarity& b) {
        return a.rotation.coeffs() == b.rotation.coeffs() && a.translation == b.translation &&
               a.scale == b.scale;
    }
};

inline Quat yaw_rotation(double yaw) { return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())); }

inline double luminance(const Vec3& c) {
    return 0.2126 * c.x() + 0.7152 * c.y() + 0.0722 * c.z();
}

// Orthonormal basis around n (Frisvad / Duff et al.).
inline void make_basis(const Vec3& n, Vec3& t, Vec3& b) {
    const double sign = std::copysign(1.0, n.z());
    const double a = -1.0 / (sign + n.z());
    const double bb = n.x() * n.y() * a;
    t = Vec3(1.0 + sign * n.x() * n.x() * a, sign * bb, -sign * n.x());
    b = Vec3(bb, sign + n.y() * n.y() * a, -n.y());
}

}  // namespace vfx
