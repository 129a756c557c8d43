#include "vfx/geometry/bvh.hpp"

#include "vfx/core/error.hpp"

#include <array>
#include <numeric>

namespace vfx {

std::optional<Hit> intersect_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const Ray& ray,
                                      double t_min) {
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 p = ray.direction.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) <= 1e-14 * e1.norm() * e2.norm() * ray.direction.norm()) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = ray.direction.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = e2.dot(q) * inv;
    if (!(t > t_min)) return std::nullopt;
    return Hit{0, t, Vec2(u, v)};
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return a;
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

namespace {
constexpr int kBins = 12;
constexpr uint32_t kLeafSize = 4;
}  // namespace

Bvh::Bvh(TriangleMesh mesh) : mesh_(std::move(mesh)) {
    if (mesh_.empty()) throw Error(ErrorKind::EmptyMesh, "cannot build a BVH over zero faces");
    if (mesh_.face_normals.size() != mesh_.faces.size()) mesh_.recompute_normals();
    const auto n = static_cast<uint32_t>(mesh_.face_count());
    std::vector<Aabb> boxes(n);
    std::vector<Vec3> centroids(n);
    for (uint32_t f = 0; f < n; ++f) {
        for (int k = 0; k < 3; ++k) boxes[f].extend(mesh_.corner(f, k));
        centroids[f] = boxes[f].center();
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * n);
    build(0, n, boxes, centroids);
}

uint32_t Bvh::build(uint32_t begin, uint32_t end, std::vector<Aabb>& boxes,
                    std::vector<Vec3>& centroids) {
    const auto index = static_cast<uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, cbox;
    for (uint32_t i = begin; i < end; ++i) {
        box.extend(boxes[order_[i]]);
        cbox.extend(centroids[order_[i]]);
    }
    nodes_[index].box = box;
    const uint32_t count = end - begin;
    const auto make_leaf = [&] {
        nodes_[index].first = begin;
        nodes_[index].count = count;
        return index;
    };
    if (count <= kLeafSize) return make_leaf();

    const int axis = cbox.longest_axis();
    const double lo = cbox.lo[axis], extent = cbox.hi[axis] - cbox.lo[axis];
    uint32_t mid = begin;
    if (extent > 0) {
        std::array<Aabb, kBins> bin_box;
        std::array<uint32_t, kBins> bin_count{};
        const auto bin_of = [&](uint32_t f) {
            const int b = static_cast<int>(kBins * (centroids[f][axis] - lo) / extent);
            return std::clamp(b, 0, kBins - 1);
        };
        for (uint32_t i = begin; i < end; ++i) {
            const int b = bin_of(order_[i]);
            ++bin_count[b];
            bin_box[b].extend(boxes[order_[i]]);
        }
        double best_cost = kInf;
        int best_split = -1;
        for (int s = 1; s < kBins; ++s) {
            Aabb l, r;
            uint32_t nl = 0, nr = 0;
            for (int b = 0; b < s; ++b) {
                if (bin_count[b]) l.extend(bin_box[b]);
                nl += bin_count[b];
            }
            for (int b = s; b < kBins; ++b) {
                if (bin_count[b]) r.extend(bin_box[b]);
                nr += bin_count[b];
            }
            if (nl == 0 || nr == 0) continue;
            const double cost = nl * l.surface_area() + nr * r.surface_area();
            if (cost < best_cost) {
                best_cost = cost;
                best_split = s;
            }
        }
        if (best_split > 0) {
            auto* pivot = std::stable_partition(order_.data() + begin, order_.data() + end,
                                                [&](uint32_t f) { return bin_of(f) < best_split; });
            mid = static_cast<uint32_t>(pivot - order_.data());
        }
    }
    if (mid == begin || mid == end) {
        // Centroids coincide or SAH found nothing: median split on the axis.
        mid = begin + count / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](uint32_t a, uint32_t b) {
                             if (centroids[a][axis] != centroids[b][axis])
                                 return centroids[a][axis] < centroids[b][axis];
                             return a < b;
                         });
    }
    build(begin, mid, boxes, centroids);
    const uint32_t right = build(mid, end, boxes, centroids);
    nodes_[index].first = right;
    nodes_[index].count = 0;
    return index;
}

std::optional<Hit> Bvh::intersect(const Ray& ray, double t_max) const {
    const Vec3 inv_dir = ray.direction.cwiseInverse();
    std::optional<Hit> best;
    double best_t = t_max;
    uint32_t stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        double t_enter;
        if (!node.box.intersect(ray.origin, inv_dir, 0.0, best_t, t_enter)) continue;
        if (node.count > 0) {
            for (uint32_t i = node.first; i < node.first + node.count; ++i) {
                const uint32_t f = order_[i];
                auto h = intersect_triangle(mesh_.corner(f, 0), mesh_.corner(f, 1),
                                            mesh_.corner(f, 2), ray, kRayEpsilon);
                if (!h || h->t > best_t) continue;
                if (best && h->t == best->t && f > best->face) continue;
                h->face = f;
                best = h;
                best_t = h->t;
            }
        } else {
            const uint32_t left = static_cast<uint32_t>(&node - nodes_.data()) + 1;
            const uint32_t right = node.first;
            // Visit the nearer child first.
            if (ray.direction[node.box.longest_axis()] > 0) {
                stack[sp++] = right;
                stack[sp++] = left;
            } else {
                stack[sp++] = left;
                stack[sp++] = right;
            }
        }
    }
    return best;
}

bool Bvh::occluded(const Ray& ray, double t_max) const {
    const Vec3 inv_dir = ray.direction.cwiseInverse();
    uint32_t stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        double t_enter;
        if (!node.box.intersect(ray.origin, inv_dir, 0.0, t_max, t_enter)) continue;
        if (node.count > 0) {
            for (uint32_t i = node.first; i < node.first + node.count; ++i) {
                const uint32_t f = order_[i];
                auto h = intersect_triangle(mesh_.corner(f, 0), mesh_.corner(f, 1),
                                            mesh_.corner(f, 2), ray, kRayEpsilon);
                if (h && h->t < t_max) return true;
            }
        } else {
            stack[sp++] = node.first;
            stack[sp++] = static_cast<uint32_t>(&node - nodes_.data()) + 1;
        }
    }
    return false;
}

std::optional<ClosestPoint> Bvh::closest_point(const Vec3& p, double max_distance) const {
    std::optional<ClosestPoint> best;
    double best_d2 = max_distance == kInf ? kInf : max_distance * max_distance;
    uint32_t stack[96];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (node.box.distance2(p) > best_d2) continue;
        if (node.count > 0) {
            for (uint32_t i = node.first; i < node.first + node.count; ++i) {
                const uint32_t f = order_[i];
                const Vec3 q = closest_point_on_triangle(p, mesh_.corner(f, 0), mesh_.corner(f, 1),
                                                         mesh_.corner(f, 2));
                const double d2 = (q - p).squaredNorm();
                if (d2 > best_d2) continue;
                if (best && d2 == best_d2 && f > best->face) continue;
                best = ClosestPoint{f, q, 0.0};
                best_d2 = d2;
            }
        } else {
            const uint32_t left = static_cast<uint32_t>(&node - nodes_.data()) + 1;
            const uint32_t right = node.first;
            if (nodes_[left].box.distance2(p) <= nodes_[right].box.distance2(p)) {
                stack[sp++] = right;
                stack[sp++] = left;
            } else {
                stack[sp++] = left;
                stack[sp++] = right;
            }
        }
    }
    if (best) best->distance = std::sqrt(best_d2);
    return best;
}

FloatImage render_depth_map(const Bvh& bvh, const CameraView& cam, Exec exec) {
    const int w = cam.intrinsics.width, h = cam.intrinsics.height;
    FloatImage out(w, h, kInf);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Ray ray = pixel_center_ray(cam, x, y);
            if (auto hit = bvh.intersect(ray)) out(x, y) = ray_depth(cam, ray, hit->t);
        }
    }
    return out;
}

Image<int64_t> render_face_ids(const Bvh& bvh, const CameraView& cam, Exec exec) {
    const int w = cam.intrinsics.width, h = cam.intrinsics.height;
    Image<int64_t> out(w, h, -1);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (auto hit = bvh.intersect(pixel_center_ray(cam, x, y))) out(x, y) = hit->face;
        }
    }
    return out;
}

}  // namespace vfx
