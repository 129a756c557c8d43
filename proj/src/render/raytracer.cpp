#include "vfx/render/raytracer.hpp"

#include "vfx/core/rng.hpp"
#include "vfx/geometry/bvh.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

namespace vfx {

std::vector<PlacedObject> objects_at_frame(const SceneRepresentation& rep, const Timeline& timeline, int frame) {
    std::vector<PlacedObject> out;
    for (const SceneObject* o : rep.foreground_objects()) {
        Similarity xf = o->transform;
        auto it = timeline.tracks.find(o->object_id);
        if (it != timeline.tracks.end() && !it->second.empty()) {
            const TrackSample& s = it->second[std::clamp<size_t>(frame, 0, it->second.size() - 1)];
            if (!s.visible) continue;
            xf = s.transform;
        } else if (!o->baked_animation.empty()) {
            xf = o->transform * o->baked_animation[std::min<size_t>(frame, o->baked_animation.size() - 1)];
        }
        out.push_back({o, xf});
    }
    return out;
}

int spp_for_frame(const Timeline& timeline, int frame, const RenderSettings& settings) {
    const bool effect = timeline.any_active(EffectKind::fire, frame) || timeline.any_active(EffectKind::smoke, frame);
    return effect ? settings.effect_spp : settings.spp;
}

namespace {

struct FaceShading {
    std::array<Vec3, 3> albedo;  // per corner
    Vec3 normal;
    double metallic = 0, f0 = 0, roughness = 1;
    bool emissive = false;
    Vec3 emission = Vec3::Zero();
};

struct SurfaceHit {
    uint32_t face;  // index into the shading table
    double t;
    Vec2 bary;
};

// Background faces come first in the shading table, object faces after.
class Tracer {
public:
    Tracer(const SceneRepresentation& rep, const std::vector<PlacedObject>& objects, const Lights& lights,
           int max_bounces)
        : lights_(lights), max_bounces_(max_bounces) {
        const TriangleMesh& bg = rep.background();
        const auto& origin = rep.background_origin();
        std::unordered_map<uint32_t, const Emitter*> emissive;
        for (const Emitter& e : lights.emitters)
            for (uint32_t f : e.faces) emissive[f] = &e;
        for (size_t f = 0; f < bg.face_count(); ++f) {
            FaceShading s;
            for (int k = 0; k < 3; ++k) s.albedo[k] = bg.has_colors() ? bg.vertex_colors[bg.faces[f][k]] : kDefaultAlbedo;
            s.normal = bg.face_normals[f];
            if (origin[f] >= 0) {
                auto it = emissive.find(static_cast<uint32_t>(origin[f]));
                if (it != emissive.end()) {
                    s.emissive = true;
                    s.emission = it->second->radiance();
                    emitter_faces_.push_back(static_cast<uint32_t>(faces_.size()));
                }
            }
            faces_.push_back(s);
            corners_.push_back({bg.corner(f, 0), bg.corner(f, 1), bg.corner(f, 2)});
        }
        background_faces_ = static_cast<uint32_t>(faces_.size());
        if (!bg.empty()) bg_ = std::make_unique<Bvh>(bg);

        std::vector<TriangleMesh> parts;
        for (const PlacedObject& p : objects) {
            const SceneObject& o = *p.object;
            if (o.mesh.empty()) continue;
            TriangleMesh m = transformed(o.mesh, p.transform);
            const MaterialSpec mat = o.material.value_or(MaterialSpec{});
            for (size_t f = 0; f < m.face_count(); ++f) {
                FaceShading s;
                for (int k = 0; k < 3; ++k) {
                    Vec3 a = mat.texture_albedo ? *mat.texture_albedo
                             : m.has_colors()    ? m.vertex_colors[m.faces[f][k]]
                                                 : kDefaultAlbedo;
                    s.albedo[k] = a.cwiseProduct(mat.color_tint);
                }
                s.normal = m.face_normals[f];
                s.metallic = mat.metallic;
                s.f0 = 0.08 * mat.specular;
                s.roughness = mat.roughness;
                faces_.push_back(s);
                corners_.push_back({m.corner(f, 0), m.corner(f, 1), m.corner(f, 2)});
            }
            m.vertex_colors.clear();
            parts.push_back(std::move(m));
        }
        if (!parts.empty()) obj_ = std::make_unique<Bvh>(merge_meshes(parts));

        double total = 0;
        for (uint32_t f : emitter_faces_) {
            const auto& c = corners_[f];
            total += 0.5 * (c[1] - c[0]).cross(c[2] - c[0]).norm();
            emitter_cdf_.push_back(total);
        }
    }

    bool has_objects() const { return obj_ != nullptr; }
    const Bvh* background_bvh() const { return bg_.get(); }
    const Bvh* object_bvh() const { return obj_.get(); }

    // Nearest hit. Ties between a background and an object face go to the background.
    std::optional<SurfaceHit> nearest(const Ray& ray, bool with_objects, bool objects_only, bool& touched) const {
        std::optional<SurfaceHit> best;
        if (bg_ && !objects_only)
            if (auto h = bg_->intersect(ray)) best = SurfaceHit{h->face, h->t, h->barycentrics};
        if (obj_ && (with_objects || objects_only))
            if (auto h = obj_->intersect(ray, best ? best->t : kInf))
                if (!best || h->t < best->t) {
                    best = SurfaceHit{background_faces_ + h->face, h->t, h->barycentrics};
                    touched = true;
                }
        return best;
    }

    bool occluded(const Ray& ray, double t_max, bool with_objects, bool& touched) const {
        if (bg_ && bg_->occluded(ray, t_max)) return true;
        if (with_objects && obj_ && obj_->occluded(ray, t_max)) {
            touched = true;
            return true;
        }
        return false;
    }

    // One path sample. `objects_only` restricts the first hit to inserted objects.
    Vec3 trace(Ray ray, Pcg32& rng, bool with_objects, bool objects_only, bool& touched, bool& hit_object) const {
        Vec3 radiance = Vec3::Zero(), throughput = Vec3::Ones();
        bool specular = true;
        for (int depth = 0;; ++depth) {
            const auto hit = nearest(ray, with_objects, objects_only && depth == 0, touched);
            if (depth == 0) hit_object = hit && hit->face >= background_faces_;
            if (!hit) {
                if (lights_.env) radiance += throughput.cwiseProduct(lights_.env->lookup(ray.direction));
                break;
            }
            const FaceShading& s = faces_[hit->face];
            if (s.emissive) {
                if (specular) radiance += throughput.cwiseProduct(s.emission);
                break;
            }
            const Vec3 p = ray.at(hit->t);
            Vec3 n = s.normal;
            if (n.dot(ray.direction) > 0) n = -n;
            const double w1 = hit->bary.x(), w2 = hit->bary.y();
            const Vec3 albedo = (1 - w1 - w2) * s.albedo[0] + w1 * s.albedo[1] + w2 * s.albedo[2];
            const Vec3 origin = p + 1e-5 * n;
            const double kd = (1 - s.metallic) * (1 - s.f0);

            if (kd > 0) radiance += throughput.cwiseProduct(kd * direct(origin, n, albedo, rng, with_objects, touched));
            if (depth == max_bounces_) break;

            const double u = rng.next_double();
            Vec3 dir;
            if (u < s.metallic || u < s.metallic + (1 - s.metallic) * s.f0) {
                if (u < s.metallic) throughput = throughput.cwiseProduct(albedo);
                const Vec3 mirror = ray.direction - 2 * ray.direction.dot(n) * n;
                dir = glossy(mirror, s.roughness, rng);
                if (dir.dot(n) <= 0) break;
                specular = s.roughness == 0;
            } else {
                throughput = throughput.cwiseProduct(albedo);
                dir = cosine_hemisphere(n, rng);
                specular = false;
            }
            ray = Ray{origin, dir};
        }
        return radiance;
    }

private:
    // Direct light from the sun and emitters through a Lambertian lobe.
    Vec3 direct(const Vec3& x, const Vec3& n, const Vec3& albedo, Pcg32& rng, bool with_objects, bool& touched) const {
        Vec3 out = Vec3::Zero();
        if (lights_.sun) {
            const Vec3& l = lights_.sun->direction;
            const double c = n.dot(l);
            if (c > 0 && !occluded(Ray{x, l}, kInf, with_objects, touched))
                out += albedo.cwiseProduct(lights_.sun->irradiance) * (c / kPi);
        }
        if (!emitter_faces_.empty()) {
            const double total = emitter_cdf_.back();
            const double pick = rng.next_double() * total;
            const size_t k = std::min<size_t>(std::upper_bound(emitter_cdf_.begin(), emitter_cdf_.end(), pick) - emitter_cdf_.begin(),
                                              emitter_faces_.size() - 1);
            const uint32_t f = emitter_faces_[k];
            const auto& c = corners_[f];
            const double r1 = std::sqrt(rng.next_double()), r2 = rng.next_double();
            const Vec3 y = (1 - r1) * c[0] + r1 * (1 - r2) * c[1] + r1 * r2 * c[2];
            Vec3 w = y - x;
            const double d2 = w.squaredNorm(), d = std::sqrt(d2);
            w /= d;
            const double cx = n.dot(w), cy = std::abs(faces_[f].normal.dot(w));
            if (cx > 0 && cy > 0 && !occluded(Ray{x, w}, d * (1 - 1e-4), with_objects, touched))
                out += albedo.cwiseProduct(faces_[f].emission) * (cx * cy * total / (kPi * d2));
        }
        return out;
    }

    static Vec3 cosine_hemisphere(const Vec3& n, Pcg32& rng) {
        const double u1 = rng.next_double(), u2 = rng.next_double();
        const double r = std::sqrt(u1), phi = 2 * kPi * u2;
        Vec3 t, b;
        make_basis(n, t, b);
        return (r * std::cos(phi) * t + r * std::sin(phi) * b + std::sqrt(std::max(0.0, 1 - u1)) * n).normalized();
    }

    // Cosine-power lobe around the mirror direction; roughness 0 is a perfect mirror.
    static Vec3 glossy(const Vec3& mirror, double roughness, Pcg32& rng) {
        const double u1 = rng.next_double(), u2 = rng.next_double();
        if (roughness <= 0) return mirror;
        const double e = std::max(1.0, 2.0 / (roughness * roughness) - 2.0);
        const double c = std::pow(u1, 1.0 / (e + 1)), s = std::sqrt(std::max(0.0, 1 - c * c));
        Vec3 t, b;
        make_basis(mirror, t, b);
        return (s * std::cos(2 * kPi * u2) * t + s * std::sin(2 * kPi * u2) * b + c * mirror).normalized();
    }

    const Lights& lights_;
    int max_bounces_;
    std::vector<FaceShading> faces_;
    std::vector<std::array<Vec3, 3>> corners_;
    uint32_t background_faces_ = 0;
    std::vector<uint32_t> emitter_faces_;
    std::vector<double> emitter_cdf_;
    std::unique_ptr<Bvh> bg_, obj_;
};

bool usable(const Vec3& v) { return v.allFinite() && (v.array() >= 0).all(); }

template <class T>
Image<T> box_down(const Image<T>& img, int factor, int w, int h) {
    Image<T> out(w, h);
    const double inv = 1.0 / (factor * factor);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            T sum = img(x * factor, y * factor) * 0.0;
            for (int j = 0; j < factor; ++j)
                for (int i = 0; i < factor; ++i) sum += img(x * factor + i, y * factor + j);
            out(x, y) = sum * inv;
        }
    return out;
}

}  // namespace

RenderPassSet render_passes(const SceneRepresentation& rep, const Timeline& timeline, int frame,
                            const CameraView& cam, const Lights& lights, const RenderSettings& settings, Exec exec) {
    const auto placed = objects_at_frame(rep, timeline, frame);
    const Tracer tracer(rep, placed, lights, settings.max_bounces);
    const int factor = std::max(1, settings.supersample);
    const CameraView hi = cam.supersampled(factor);
    const int w = hi.intrinsics.width, h = hi.intrinsics.height;
    const int spp = std::max(1, spp_for_frame(timeline, frame, settings));

    ColorImage with(w, h), without(w, h), obj(w, h);
    FloatImage alpha(w, h, 0.0);
    const uint64_t frame_seed = hash_combine(settings.seed, static_cast<uint64_t>(frame));
    size_t nonfinite = 0;

#pragma omp parallel for schedule(dynamic, 1) reduction(+ : nonfinite) if (exec == Exec::parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Ray primary = pixel_center_ray(hi, x, y);
            const uint64_t pixel_seed = hash_combine(frame_seed, static_cast<uint64_t>(y) * w + x);
            Vec3 sum_with = Vec3::Zero(), sum_without = Vec3::Zero(), sum_obj = Vec3::Zero();
            bool covered = false, uncovered = !tracer.has_objects();
            for (int s = 0; s < spp; ++s) {
                const uint64_t sample_seed = hash_combine(pixel_seed, static_cast<uint64_t>(s));
                const auto clean = [&](Vec3 v) {
                    if (usable(v)) return v;
                    ++nonfinite;
                    return Vec3(Vec3::Zero());
                };
                bool touched = false, first_obj = false;
                Pcg32 rng(sample_seed);
                const Vec3 a = clean(tracer.trace(primary, rng, true, false, touched, first_obj));
                sum_with += a;
                if (touched) {
                    Pcg32 again(sample_seed);
                    bool unused = false, unused_obj = false;
                    sum_without += clean(tracer.trace(primary, again, false, false, unused, unused_obj));
                } else {
                    sum_without += a;
                }
                if (!uncovered) {
                    Pcg32 orng(hash_combine(sample_seed, 0x6f626aULL));
                    bool t2 = false, hit = false;
                    const Vec3 c = tracer.trace(primary, orng, true, true, t2, hit);
                    if (!hit) {
                        uncovered = true;  // coverage is the same for every sample
                        continue;
                    }
                    covered = true;
                    sum_obj += clean(c);
                }
            }
            with(x, y) = sum_with / spp;
            without(x, y) = sum_without / spp;
            if (covered) {
                obj(x, y) = sum_obj / spp;
                alpha(x, y) = 1.0;
            }
        }
    }

    RenderPassSet out;
    const int ow = cam.intrinsics.width, oh = cam.intrinsics.height;
    out.bg_with_objects = box_down(with, factor, ow, oh);
    out.bg_only = box_down(without, factor, ow, oh);
    out.object_color = box_down(obj, factor, ow, oh);
    out.object_alpha = box_down(alpha, factor, ow, oh);
    out.bg_depth = tracer.background_bvh() ? render_depth_map(*tracer.background_bvh(), cam, exec) : FloatImage(ow, oh, kInf);
    out.object_depth = tracer.object_bvh() ? render_depth_map(*tracer.object_bvh(), cam, exec) : FloatImage(ow, oh, kInf);
    out.spp = spp;
    out.nonfinite = nonfinite;
    return out;
}

}  // namespace vfx
