#include "vfx/geometry/mass.hpp"

#include "vfx/core/error.hpp"

namespace vfx {
namespace {

MassProperties surface_centroid(const TriangleMesh& mesh) {
    MassProperties out;
    out.surface_fallback = true;
    double area = 0;
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        const double a = mesh.face_area(f);
        out.center_of_mass += a * mesh.face_centroid(f);
        area += a;
    }
    if (area > 0) out.center_of_mass /= area;
    return out;
}

}  // namespace

MassProperties mass_properties(const TriangleMesh& mesh, double density, bool allow_fallback) {
    if (mesh.empty()) throw Error(ErrorKind::EmptyMesh, "mass properties of an empty mesh");
    if (!is_watertight(mesh)) {
        if (allow_fallback) return surface_centroid(mesh);
        throw Error(ErrorKind::NotWatertight, "mass properties need a closed mesh");
    }
    // Shift to a local origin near the mesh so the tetrahedron sums stay well conditioned.
    const Vec3 origin = mesh.bounds().center();
    const Mat3 canonical = (Mat3() << 2, 1, 1, 1, 2, 1, 1, 1, 2).finished() / 120.0;
    double volume = 0;
    Vec3 first = Vec3::Zero();
    Mat3 second = Mat3::Zero();
    for (size_t f = 0; f < mesh.face_count(); ++f) {
        Mat3 a;
        a.col(0) = mesh.corner(f, 0) - origin;
        a.col(1) = mesh.corner(f, 1) - origin;
        a.col(2) = mesh.corner(f, 2) - origin;
        const double det = a.determinant();
        volume += det / 6.0;
        first += det / 24.0 * (a.col(0) + a.col(1) + a.col(2));
        second += det * a * canonical * a.transpose();
    }
    if (!(volume > 0)) {
        if (allow_fallback) return surface_centroid(mesh);
        throw Error(ErrorKind::Degenerate, "closed mesh encloses no positive volume");
    }
    MassProperties out;
    out.volume = volume;
    out.mass = density * volume;
    const Vec3 c = first / volume;
    out.center_of_mass = c + origin;
    const Mat3 cov = density * (second - volume * c * c.transpose());
    out.inertia = cov.trace() * Mat3::Identity() - cov;
    return out;
}

}  // namespace vfx
