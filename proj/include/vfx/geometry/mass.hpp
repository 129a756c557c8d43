#pragma once

#include "vfx/scene/mesh.hpp"

namespace vfx {

struct MassProperties {
    double mass = 0.0;  // density * volume
    Vec3 center_of_mass = Vec3::Zero();
    double volume = 0.0;
    Mat3 inertia = Mat3::Zero();  // about the center of mass, world axes
    bool surface_fallback = false;
};

/// Solid properties from signed tetrahedra against the origin. A mesh that is
/// not watertight throws NotWatertight unless `allow_fallback`, in which case
/// the area-weighted surface centroid is returned with volume 0 and the flag set.
MassProperties mass_properties(const TriangleMesh& mesh, double density = 1.0,
                               bool allow_fallback = false);

}  // namespace vfx
