#include "vfx/lift/lift.hpp"

#include "vfx/core/error.hpp"
#include "vfx/geometry/kdtree.hpp"
#include "vfx/splat/splat.hpp"

#include <algorithm>

namespace vfx {
namespace {

BinaryImage label_mask(const MaskImage& mask, const std::set<uint16_t>& ids) {
    BinaryImage out(mask.width(), mask.height(), 0);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) out(x, y) = ids.count(mask(x, y)) ? 1 : 0;
    return out;
}

std::set<uint16_t> require_label(const SceneBundle& bundle, const std::string& label) {
    auto ids = bundle.label_ids(label);
    if (ids.empty()) throw Error(ErrorKind::UnknownLabel, "no mask carries label '" + label + "'");
    return ids;
}

}  // namespace

FaceVotes vote_face_visibility(const SceneBundle& bundle, const Bvh& bvh, const std::string& label,
                               Exec exec) {
    const auto ids = require_label(bundle, label);
    const size_t nf = bvh.mesh().face_count();
    const int views = static_cast<int>(bundle.cameras.size());
    std::vector<std::vector<uint8_t>> hit(views, std::vector<uint8_t>(nf, 0));
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
    for (int v = 0; v < views; ++v) {
        if (static_cast<size_t>(v) >= bundle.masks.size()) continue;
        const CameraView& cam = bundle.cameras[v];
        const MaskImage& mask = bundle.masks[v];
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x) {
                if (!ids.count(mask(x, y))) continue;
                if (auto h = bvh.intersect(pixel_center_ray(cam, x, y))) hit[v][h->face] = 1;
            }
    }
    FaceVotes out;
    out.views = static_cast<uint32_t>(views);
    out.votes.assign(nf, 0);
    for (int v = 0; v < views; ++v)
        for (size_t f = 0; f < nf; ++f) out.votes[f] += hit[v][f];
    return out;
}

double mask_iou(const FloatImage& alpha, const BinaryImage& mask) {
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        const bool a = alpha.pixels()[i] >= kAlphaBin;
        const bool s = mask.pixels()[i] != 0;
        inter += a && s;
        uni += a || s;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<uint32_t> nearest_face_of_gaussians(const TriangleMesh& mesh, const GaussianCloud& cloud) {
    std::vector<Vec3> centroids(mesh.face_count());
    for (size_t f = 0; f < centroids.size(); ++f) centroids[f] = mesh.face_centroid(f);
    KdTree tree(centroids);
    std::vector<uint32_t> out(cloud.size());
    for (size_t g = 0; g < cloud.size(); ++g) out[g] = tree.nearest(cloud[g].center);
    return out;
}

LiftResult lift_instance(const SceneBundle& bundle, const Bvh& bvh, const std::string& label, Exec exec) {
    const auto ids = require_label(bundle, label);
    LiftResult res;
    res.votes = vote_face_visibility(bundle, bvh, label, exec);
    const uint32_t n = res.votes.views;
    const auto& mesh = bvh.mesh();
    const auto nearest = nearest_face_of_gaussians(mesh, bundle.gaussians);

    std::vector<BinaryImage> targets;
    for (const auto& m : bundle.masks) targets.push_back(label_mask(m, ids));

    std::vector<uint32_t> prev_faces;
    std::vector<uint32_t> prev_gauss;
    double prev_miou = -1;
    double best = -1;
    for (int k = 1; k < kTauSteps; ++k) {
        std::vector<uint32_t> faces;
        // V(f) >= k/20 evaluated on integers: votes * 20 >= k * N.
        for (uint32_t f = 0; f < mesh.face_count(); ++f)
            if (uint64_t(res.votes.votes[f]) * kTauSteps >= uint64_t(k) * n) faces.push_back(f);
        res.face_counts[k - 1] = faces.size();
        if (faces.empty()) continue;

        double miou;
        std::vector<uint32_t> gauss;
        if (faces == prev_faces) {
            // Nested sets: identical F gives identical G and mIoU.
            miou = prev_miou;
            gauss = prev_gauss;
        } else {
            std::vector<uint8_t> in_f(mesh.face_count(), 0);
            for (uint32_t f : faces) in_f[f] = 1;
            GaussianCloud subset;
            for (uint32_t g = 0; g < nearest.size(); ++g)
                if (in_f[nearest[g]]) {
                    gauss.push_back(g);
                    subset.push_back(bundle.gaussians[g]);
                }
            const int views = static_cast<int>(bundle.cameras.size());
            std::vector<double> ious(views, 0.0);
            for (int v = 0; v < views; ++v) {
                const auto img = render_splats(subset, bundle.cameras[v], exec);
                ious[v] = mask_iou(img.alpha, targets[v]);
            }
            double sum = 0;
            for (double x : ious) sum += x;
            miou = sum / views;
        }
        res.miou_curve[tau_at(k)] = miou;
        if (miou > best) {
            best = miou;
            res.tau_star = tau_at(k);
            res.face_set = faces;
            res.gaussian_set = gauss;
        }
        prev_faces = std::move(faces);
        prev_gauss = std::move(gauss);
        prev_miou = miou;
    }
    if (res.miou_curve.empty())
        throw Error(ErrorKind::EmptySelection, "no threshold selects any face for '" + label + "'");
    return res;
}

SceneObject& extract_object(SceneRepresentation& rep, const LiftResult& lift, const std::string& name) {
    if (lift.face_set.empty()) throw Error(ErrorKind::EmptySelection, "lift selected no faces");
    const SceneBundle& b = rep.bundle();
    TriangleMesh world = extract_faces(b.mesh, lift.face_set);
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : world.vertices) centroid += v;
    centroid /= static_cast<double>(world.vertices.size());

    SceneObject obj;
    obj.name = name;
    obj.object_id = rep.new_object_id(name);
    obj.source = ObjectSource::extracted;
    obj.mesh = std::move(world);
    for (auto& v : obj.mesh.vertices) v -= centroid;
    obj.gaussians = GaussianCloud{};
    for (uint32_t g : lift.gaussian_set) {
        Gaussian gs = b.gaussians[g];
        gs.center -= centroid;
        obj.gaussians->push_back(gs);
    }
    obj.transform.translation = centroid;
    obj.source_faces = lift.face_set;
    obj.source_gaussians = lift.gaussian_set;
    obj.in_background = true;
    obj.inserted = true;
    return rep.add_object(std::move(obj));
}

void detach_from_background(SceneRepresentation& rep, SceneObject& obj) {
    if (obj.source != ObjectSource::extracted || !obj.in_background) return;
    rep.cut_background(obj.source_faces);
    rep.removed_gaussians.insert(obj.source_gaussians.begin(), obj.source_gaussians.end());
    obj.in_background = false;
}

void remove_instance(SceneRepresentation& rep, const std::string& object_id) {
    SceneObject& obj = rep.object(object_id);
    if (obj.source != ObjectSource::extracted)
        throw Error(ErrorKind::PreconditionFailed, "remove_instance needs an extracted object, got asset " + object_id);
    detach_from_background(rep, obj);
    rep.objects.erase(object_id);
}

}  // namespace vfx
