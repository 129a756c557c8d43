#include "vfx/sim/physics.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/rng.hpp"
#include "vfx/geometry/bvh.hpp"
#include "vfx/geometry/fracture.hpp"
#include "vfx/geometry/hull.hpp"
#include "vfx/geometry/mass.hpp"
#include "vfx/lift/lift.hpp"
#include "vfx/splat/splat.hpp"

#include <algorithm>
#include <memory>

namespace vfx {

void validate_contact_params(const ContactParams& p) {
    const auto bad = [](const std::string& what) { throw Error(ErrorKind::ConfigError, what); };
    if (!(p.restitution >= 0 && p.restitution <= 1)) bad("restitution must lie in [0,1]");
    if (!(p.friction >= 0)) bad("friction must be >= 0");
    if (!(p.baumgarte_beta >= 0 && p.baumgarte_beta <= 1)) bad("baumgarte_beta must lie in [0,1]");
    if (!(p.penetration_slop >= 0)) bad("penetration_slop must be >= 0");
    if (!(p.dt > 0)) bad("dt must be > 0");
    if (!(p.density > 0)) bad("density must be > 0");
    if (!(p.solver_iterations >= 1)) bad("solver_iterations must be >= 1");
}

double mechanical_energy(const RigidBodyState& s) {
    const Mat3 r = s.orientation.toRotationMatrix();
    const Vec3 w_body = r.transpose() * s.angular_velocity;
    return 0.5 * s.mass * s.linear_velocity.squaredNorm() + 0.5 * w_body.dot(s.inertia * w_body) -
           s.mass * gravity().dot(s.position);
}

namespace {

struct Body {
    RigidBodyState s;
    Mat3 inv_inertia_body;
    std::vector<Vec3> hull;  // body frame, relative to the center of mass
    HalfSpaces planes;       // body frame
    double radius = 0;
    Vec3 com_object = Vec3::Zero();  // center of mass in the scaled object frame
    size_t object = 0;               // index into the simulation's object list
    int group = -1;                  // pieces of one parent share a group and ignore each other
    bool fracturable = false;
    bool active = true;
    double impulse = 0;  // normal impulse taken during the current step
    bool touched = false;

    Mat3 inv_inertia_world() const {
        const Mat3 r = s.orientation.toRotationMatrix();
        return r * inv_inertia_body * r.transpose();
    }
    Vec3 point_velocity(const Vec3& r) const { return s.linear_velocity + s.angular_velocity.cross(r); }
    void apply_impulse(const Vec3& j, const Vec3& r) {
        s.linear_velocity += j / s.mass;
        s.angular_velocity += inv_inertia_world() * r.cross(j);
    }
};

struct Contact {
    int a = -1, b = -1;  // b < 0: static scene
    Vec3 n, ra, rb, t1, t2;
    double target = 0;
    double kn = 0, kt1 = 0, kt2 = 0;
    double jn = 0, jt1 = 0, jt2 = 0;
};

// Body from points in a local frame; throws MissingHull when they span no volume.
Body make_body(const std::vector<Vec3>& points, double density, const std::string& what) {
    TriangleMesh hull;
    try {
        hull = convex_hull(points);
    } catch (const Error& e) {
        throw Error(ErrorKind::MissingHull, what + ": no convex hull (" + e.what() + ")");
    }
    const MassProperties mp = mass_properties(hull, density);
    if (!(mp.mass > 0)) throw Error(ErrorKind::MissingHull, what + ": hull has no volume");
    Body b;
    b.s.mass = mp.mass;
    b.s.inertia = mp.inertia;
    b.inv_inertia_body = mp.inertia.inverse();
    b.com_object = mp.center_of_mass;
    for (const Vec3& v : hull.vertices) {
        b.hull.push_back(v - mp.center_of_mass);
        b.radius = std::max(b.radius, b.hull.back().norm());
    }
    b.planes = face_planes(hull);
    for (size_t i = 0; i < b.planes.normals.size(); ++i)
        b.planes.offsets[i] -= b.planes.normals[i].dot(mp.center_of_mass);
    return b;
}

class World {
public:
    World(const TriangleMesh& scene, const ContactParams& params) : p_(params) {
        if (!scene.empty()) bvh_ = std::make_unique<Bvh>(scene);
    }

    std::vector<Body> bodies;
    // Fracture requests raised in the last step, by body index.
    std::vector<size_t> broken;

    void step() {
        const double dt = p_.dt;
        std::vector<Vec3> v_old(bodies.size());
        for (size_t i = 0; i < bodies.size(); ++i) {
            Body& b = bodies[i];
            v_old[i] = b.s.linear_velocity;
            b.impulse = 0;
            b.touched = false;
            if (b.active) b.s.linear_velocity += gravity() * dt;
        }
        std::vector<Contact> contacts;
        for (size_t i = 0; i < bodies.size(); ++i)
            if (bodies[i].active) scene_contacts(static_cast<int>(i), contacts);
        for (size_t i = 0; i < bodies.size(); ++i)
            for (size_t j = i + 1; j < bodies.size(); ++j) {
                const Body &a = bodies[i], &b = bodies[j];
                if (!a.active || !b.active || (a.group >= 0 && a.group == b.group)) continue;
                const double reach = a.radius + b.radius + margin(a) + margin(b);
                if ((a.s.position - b.s.position).squaredNorm() > reach * reach) continue;
                pair_contacts(static_cast<int>(i), static_cast<int>(j), contacts);
                pair_contacts(static_cast<int>(j), static_cast<int>(i), contacts);
            }
        solve(contacts);

        broken.clear();
        for (size_t i = 0; i < bodies.size(); ++i) {
            Body& b = bodies[i];
            if (!b.active) continue;
            // Untouched bodies follow the exact ballistic arc.
            if (b.touched)
                b.s.position += b.s.linear_velocity * dt;
            else
                b.s.position += 0.5 * (v_old[i] + b.s.linear_velocity) * dt;
            const Vec3 w = b.s.angular_velocity;
            Quat dq(0, w.x(), w.y(), w.z());
            dq = dq * b.s.orientation;
            b.s.orientation.coeffs() += 0.5 * dt * dq.coeffs();
            b.s.orientation.normalize();
            if (b.fracturable && b.impulse / b.s.mass > p_.fracture_delta_v) broken.push_back(i);
        }
    }

    // Deepest penetration of the body's hull vertices into the static scene.
    double penetration(const Body& b) const {
        if (!bvh_) return 0;
        const Mat3 r = b.s.orientation.toRotationMatrix();
        double worst = 0;
        for (const Vec3& h : b.hull) {
            double d;
            Vec3 n;
            if (scene_distance(b.s.position + r * h, 0.05, d, n)) worst = std::max(worst, -d);
        }
        return worst;
    }

private:
    double margin(const Body& b) const {
        return (b.s.linear_velocity.norm() + b.s.angular_velocity.norm() * b.radius) * p_.dt + 0.01;
    }

    // Signed distance to the static scene within `reach`, with the push-out normal.
    bool scene_distance(const Vec3& w, double reach, double& d, Vec3& n) const {
        const auto cp = bvh_->closest_point(w, reach);
        if (!cp) return false;
        const Vec3 fn = bvh_->mesh().face_normals[cp->face];
        const Vec3 off = w - cp->point;
        const double len = off.norm();
        if (off.dot(fn) >= 0 && len > 1e-12) {
            d = len;
            n = off / len;
        } else {
            d = off.dot(fn);
            n = fn;
        }
        return true;
    }

    void add_contact(int a, int b, const Vec3& n, const Vec3& w, double d, std::vector<Contact>& out) {
        Body& A = bodies[a];
        Contact c;
        c.a = a, c.b = b, c.n = n;
        c.ra = w - A.s.position;
        Vec3 rel = A.point_velocity(c.ra);
        if (b >= 0) {
            c.rb = w - bodies[b].s.position;
            rel -= bodies[b].point_velocity(c.rb);
        }
        const double vn = rel.dot(n);
        const double dt = p_.dt;
        // Only contacts that can close within this step.
        if (d > p_.penetration_slop && d + std::min(vn, 0.0) * dt > p_.penetration_slop) return;
        if (vn < -p_.bounce_threshold && p_.restitution > 0)
            c.target = -p_.restitution * vn;
        else if (d >= 0)
            c.target = -d / dt;
        else
            c.target = std::max(0.0, p_.baumgarte_beta * (-d - p_.penetration_slop) / dt);
        make_basis(n, c.t1, c.t2);
        const auto k = [&](const Vec3& dir) {
            double kk = 1.0 / A.s.mass + (A.inv_inertia_world() * c.ra.cross(dir)).cross(c.ra).dot(dir);
            if (b >= 0) {
                const Body& B = bodies[b];
                kk += 1.0 / B.s.mass + (B.inv_inertia_world() * c.rb.cross(dir)).cross(c.rb).dot(dir);
            }
            return kk;
        };
        c.kn = k(n), c.kt1 = k(c.t1), c.kt2 = k(c.t2);
        out.push_back(c);
    }

    void scene_contacts(int i, std::vector<Contact>& out) {
        if (!bvh_) return;
        const Body& b = bodies[i];
        const double m = margin(b);
        if (!bvh_->closest_point(b.s.position, b.radius + m)) return;
        const Mat3 r = b.s.orientation.toRotationMatrix();
        for (const Vec3& h : b.hull) {
            const Vec3 w = b.s.position + r * h;
            double d;
            Vec3 n;
            if (scene_distance(w, m, d, n)) add_contact(i, -1, n, w, d, out);
        }
    }

    // Vertices of body a against the hull planes of body b.
    void pair_contacts(int a, int b, std::vector<Contact>& out) {
        const Body &A = bodies[a], &B = bodies[b];
        const Mat3 ra = A.s.orientation.toRotationMatrix(), rb = B.s.orientation.toRotationMatrix();
        const double m = margin(A) + margin(B);
        for (const Vec3& h : A.hull) {
            const Vec3 w = A.s.position + ra * h;
            const Vec3 x = rb.transpose() * (w - B.s.position);
            double best = -kInf;
            size_t best_k = 0;
            for (size_t k = 0; k < B.planes.normals.size(); ++k) {
                const double d = B.planes.normals[k].dot(x) - B.planes.offsets[k];
                if (d > best) best = d, best_k = k;
            }
            if (best < m) add_contact(a, b, rb * B.planes.normals[best_k], w, best, out);
        }
    }

    void solve(std::vector<Contact>& contacts) {
        for (auto& c : contacts) {
            bodies[c.a].touched = true;
            if (c.b >= 0) bodies[c.b].touched = true;
        }
        const auto relative = [&](const Contact& c) {
            Vec3 rel = bodies[c.a].point_velocity(c.ra);
            if (c.b >= 0) rel -= bodies[c.b].point_velocity(c.rb);
            return rel;
        };
        const auto push = [&](const Contact& c, const Vec3& j) {
            bodies[c.a].apply_impulse(j, c.ra);
            if (c.b >= 0) bodies[c.b].apply_impulse(-j, c.rb);
        };
        for (int it = 0; it < p_.solver_iterations; ++it) {
            for (auto& c : contacts) {
                const double vn = relative(c).dot(c.n);
                const double jn = std::max(c.jn + (c.target - vn) / c.kn, 0.0);
                push(c, (jn - c.jn) * c.n);
                c.jn = jn;
                const double limit = p_.friction * c.jn;
                for (int t = 0; t < 2; ++t) {
                    const Vec3& dir = t == 0 ? c.t1 : c.t2;
                    double& acc = t == 0 ? c.jt1 : c.jt2;
                    const double kt = t == 0 ? c.kt1 : c.kt2;
                    const double jt = std::clamp(acc - relative(c).dot(dir) / kt, -limit, limit);
                    push(c, (jt - acc) * dir);
                    acc = jt;
                }
            }
        }
        for (const auto& c : contacts) {
            bodies[c.a].impulse += c.jn;
            if (c.b >= 0) bodies[c.b].impulse += c.jn;
        }
    }

    ContactParams p_;
    std::unique_ptr<Bvh> bvh_;
};

bool finite(const RigidBodyState& s) {
    return s.position.allFinite() && s.linear_velocity.allFinite() && s.angular_velocity.allFinite() &&
           s.orientation.coeffs().allFinite();
}

int64_t steps_until(int frame, double fps, double dt) { return std::llround(frame / (fps * dt)); }

}  // namespace

BodyTrace simulate_single_body(const std::vector<Vec3>& hull_points, const Vec3& initial_velocity,
                               const TriangleMesh& scene, const ContactParams& params, int frames, double fps) {
    validate_contact_params(params);
    World world(scene, params);
    Body b = make_body(hull_points, params.density, "body");
    b.s.position = b.com_object;
    b.s.linear_velocity = initial_velocity;
    world.bodies.push_back(b);
    BodyTrace trace;
    int64_t done = 0;
    for (int f = 0; f < frames; ++f) {
        for (const int64_t n = steps_until(f, fps, params.dt); done < n; ++done) {
            world.step();
            if (!finite(world.bodies[0].s))
                throw Error(ErrorKind::NonFiniteState, "simulation diverged before frame " + std::to_string(f));
        }
        trace.states.push_back(world.bodies[0].s);
        trace.max_penetration.push_back(world.penetration(world.bodies[0]));
    }
    return trace;
}

Timeline simulate_rigid(SceneRepresentation& rep, const std::vector<std::string>& object_ids,
                        const ContactParams& params, int frames, double fps, uint64_t seed) {
    validate_contact_params(params);
    if (frames < 1 || !(fps > 0)) throw Error(ErrorKind::InvariantViolation, "frames must be >= 1 and fps > 0");
    std::set<std::string> simulated(object_ids.begin(), object_ids.end());
    for (const auto& id : object_ids) {
        SceneObject& obj = rep.object(id);
        if (!obj.physics_enabled) throw Error(ErrorKind::PreconditionFailed, "physics is not enabled for " + id);
        detach_from_background(rep, obj);
    }

    // Static colliders: background plus foreground objects that are not simulated.
    std::vector<TriangleMesh> statics{rep.background()};
    for (const SceneObject* o : rep.foreground_objects())
        if (!simulated.count(o->object_id)) statics.push_back(transformed(o->mesh, o->transform));
    World world(merge_meshes(statics), params);

    struct Tracked {
        std::string id;
        double scale = 1;
        int first_visible = 0;
        int last_visible = std::numeric_limits<int>::max();
        Similarity created;  // transform shown before the object exists
    };
    std::vector<Tracked> tracked;

    const auto object_transform = [&](const Body& b) {
        Similarity xf;
        xf.rotation = b.s.orientation;
        xf.scale = tracked[b.object].scale;
        xf.translation = b.s.position - b.s.orientation * b.com_object;
        return xf;
    };

    for (const auto& id : object_ids) {
        const SceneObject& obj = rep.object(id);
        std::vector<Vec3> pts;
        for (const Vec3& v : obj.mesh.vertices) pts.push_back(obj.transform.scale * v);
        Body b = make_body(pts, params.density, id);
        b.s.orientation = obj.transform.rotation;
        b.s.position = obj.transform.apply(b.com_object / obj.transform.scale);
        b.object = tracked.size();
        b.fracturable = obj.fracture_enabled;
        tracked.push_back({id, obj.transform.scale, 0, std::numeric_limits<int>::max(), obj.transform});
        world.bodies.push_back(b);
    }

    // Replaces body i by its pieces; they become visible from `frame`.
    const auto fracture = [&](size_t i, int frame) {
        Body parent = world.bodies[i];
        world.bodies[i].active = false;
        tracked[parent.object].last_visible = frame - 1;
        const Tracked pt = tracked[parent.object];
        const SceneObject src = rep.object(pt.id);
        TriangleMesh scaled = src.mesh;
        for (Vec3& v : scaled.vertices) v *= pt.scale;
        const auto fr = voronoi_fracture(scaled, kDefaultFractureCount, hash_combine(seed, std::hash<std::string>{}(pt.id)));
        const Similarity origin = object_transform(parent);
        Similarity frame_xf = origin;
        frame_xf.scale = 1.0;

        // Gaussians follow the Voronoi cell of their (scaled) center.
        std::vector<GaussianCloud> piece_gaussians(fr.pieces.size());
        if (src.gaussians) {
            Similarity s;
            s.scale = pt.scale;
            std::vector<int> site_piece(fr.sites.size(), -1);
            for (size_t k = 0; k < fr.pieces.size(); ++k) site_piece[fr.piece_site[k]] = static_cast<int>(k);
            for (const Gaussian& g : transform_gaussians(*src.gaussians, s)) {
                int best = -1;
                double best_d = kInf;
                for (size_t k = 0; k < fr.pieces.size(); ++k) {
                    const double d = (fr.sites[fr.piece_site[k]] - g.center).squaredNorm();
                    if (d < best_d) best_d = d, best = static_cast<int>(k);
                }
                if (best >= 0) piece_gaussians[best].push_back(g);
            }
        }
        for (size_t k = 0; k < fr.pieces.size(); ++k) {
            Body b = make_body(fr.pieces[k].vertices, params.density, pt.id + " piece");
            b.s.orientation = parent.s.orientation;
            b.s.position = frame_xf.apply(b.com_object);
            b.s.linear_velocity = parent.point_velocity(b.s.position - parent.s.position);
            b.s.angular_velocity = parent.s.angular_velocity;
            b.group = static_cast<int>(i);

            SceneObject piece;
            piece.object_id = pt.id + "_piece_" + std::to_string(k);
            piece.name = src.name + " piece";
            piece.source = ObjectSource::asset;
            piece.mesh = fr.pieces[k];
            if (!piece_gaussians[k].empty()) piece.gaussians = piece_gaussians[k];
            piece.transform = frame_xf;
            piece.physics_enabled = true;
            piece.material = src.material;
            piece.inserted = true;
            rep.add_object(std::move(piece));

            b.object = tracked.size();
            tracked.push_back({pt.id + "_piece_" + std::to_string(k), 1.0, frame, std::numeric_limits<int>::max(), frame_xf});
            world.bodies.push_back(b);
        }
    };

    for (size_t i = 0, n = world.bodies.size(); i < n; ++i)
        if (rep.object(tracked[world.bodies[i].object].id).break_at_start) fracture(i, 0);

    // samples[k][f] for tracked object k.
    std::vector<std::vector<TrackSample>> samples(tracked.size());
    int64_t done = 0;
    for (int f = 0; f < frames; ++f) {
        for (const int64_t n = steps_until(f, fps, params.dt); done < n; ++done) {
            world.step();
            const auto broken = world.broken;
            for (size_t i : broken) fracture(i, f);
            for (const Body& b : world.bodies)
                if (b.active && !finite(b.s))
                    throw Error(ErrorKind::NonFiniteState, "simulation diverged before frame " + std::to_string(f));
        }
        samples.resize(tracked.size());
        std::vector<const Body*> live(tracked.size(), nullptr);
        std::vector<const Body*> last(tracked.size(), nullptr);
        for (const Body& b : world.bodies) {
            last[b.object] = &b;
            if (b.active) live[b.object] = &b;
        }
        for (size_t k = 0; k < tracked.size(); ++k) {
            TrackSample ts;
            const Tracked& t = tracked[k];
            ts.visible = f >= t.first_visible && f <= t.last_visible;
            ts.transform = live[k] ? object_transform(*live[k]) : last[k] ? object_transform(*last[k]) : t.created;
            if (f < t.first_visible) ts.transform = t.created;
            samples[k].push_back(ts);
        }
    }

    Timeline tl;
    tl.fps = fps;
    tl.frame_count = frames;
    for (size_t k = 0; k < tracked.size(); ++k) {
        auto& s = samples[k];
        // Pieces born mid-run get placeholder samples for the frames before them.
        if (s.size() < static_cast<size_t>(frames)) {
            std::vector<TrackSample> pad(frames - s.size(), TrackSample{tracked[k].created, false});
            s.insert(s.begin(), pad.begin(), pad.end());
        }
        tl.tracks[tracked[k].id] = std::move(s);
    }
    return tl;
}

}  // namespace vfx
