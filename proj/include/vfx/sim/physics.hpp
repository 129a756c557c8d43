#pragma once

#include "vfx/core/math.hpp"
#include "vfx/scene/representation.hpp"
#include "vfx/scene/timeline.hpp"

#include <string>
#include <vector>

namespace vfx {

struct RigidBodyState {
    Vec3 position = Vec3::Zero();  // center of mass, world
    Quat orientation = Quat::Identity();
    Vec3 linear_velocity = Vec3::Zero();
    Vec3 angular_velocity = Vec3::Zero();
    double mass = 1.0;
    Mat3 inertia = Mat3::Identity();  // body frame, about the center of mass
};

struct ContactParams {
    double restitution = 0.4;
    double friction = 0.5;
    double baumgarte_beta = 0.2;
    double penetration_slop = 1e-3;
    double dt = 1.0 / 240.0;
    double density = 500.0;          // kg/m^3 for hull mass properties
    double bounce_threshold = 0.2;   // m/s; slower impacts do not bounce
    double fracture_delta_v = 2.0;   // m/s of impulse per unit mass that breaks a fracturable body
    int solver_iterations = 12;
};

/// Throws ConfigError for values outside their ranges.
void validate_contact_params(const ContactParams& p);

inline const Vec3& gravity() {
    static const Vec3 g(0.0, 0.0, -9.81);
    return g;
}

/// Kinetic plus gravitational potential energy (z measured from 0).
double mechanical_energy(const RigidBodyState& s);

/// Simulates the listed objects (all must have physics enabled) against the
/// background mesh, the static foreground objects and each other. Extracted
/// objects are first detached from the background. Fracturable bodies that
/// take a large enough impulse, or that are marked to break at the start, are
/// replaced by their Voronoi pieces, which are added to `rep` as new objects
/// and tracked with `visible` false before the break (the parent after it).
/// Returns one track per simulated object and piece.
/// Throws PreconditionFailed, MissingHull, NonFiniteState.
Timeline simulate_rigid(SceneRepresentation& rep, const std::vector<std::string>& object_ids,
                        const ContactParams& params, int frames, double fps, uint64_t seed);

struct BodyTrace {
    std::vector<RigidBodyState> states;  // one per output frame
    std::vector<double> max_penetration; // per output frame, meters (0 if none)
};

/// One convex body, given by its points in the world at t = 0, released into a
/// static mesh (empty for free fall). Records the raw state at every frame.
BodyTrace simulate_single_body(const std::vector<Vec3>& hull_points, const Vec3& initial_velocity,
                               const TriangleMesh& scene, const ContactParams& params, int frames, double fps);

}  // namespace vfx
