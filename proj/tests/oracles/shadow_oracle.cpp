#include "oracles/shadow_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

bool ray_hits_box(const vfx::Vec3& o, const vfx::Vec3& d, const vfx::Vec3& lo, const vfx::Vec3& hi) {
    double t0 = 0, t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (o[a] < lo[a] || o[a] > hi[a]) return false;
            continue;
        }
        double ta = (lo[a] - o[a]) / d[a], tb = (hi[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

uint8_t classify_ray(const vfx::Ray& r, const vfx::Vec3& lo, const vfx::Vec3& hi, const vfx::Vec3& sun,
                     double margin) {
    if (ray_hits_box(r.origin, r.direction, lo, hi)) return kUnclassified;
    if (r.direction.z() >= 0) return kUnclassified;
    const vfx::Vec3 q = r.origin + (-r.origin.z() / r.direction.z()) * r.direction;
    if (ray_hits_box(q + 1e-9 * sun, sun, lo, hi)) return kShadowFloor;
    const double dx = std::max({lo.x() - q.x(), 0.0, q.x() - hi.x()});
    const double dy = std::max({lo.y() - q.y(), 0.0, q.y() - hi.y()});
    return std::hypot(dx, dy) < margin ? kUnclassified : kLitFloor;
}

}  // namespace

vfx::MaskImage classify_box_shadow(const vfx::CameraView& cam, const vfx::Vec3& box_lo, const vfx::Vec3& box_hi,
                                   const vfx::Vec3& sun_direction, double lit_margin, int subsamples, int band) {
    const int w = cam.intrinsics.width, h = cam.intrinsics.height;
    const vfx::CameraView fine = cam.supersampled(subsamples);
    const vfx::Vec3 sun = sun_direction.normalized();
    vfx::MaskImage out(w, h, kUnclassified);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int first = -1;
            bool mixed = false;
            for (int j = 0; j < subsamples && !mixed; ++j)
                for (int i = 0; i < subsamples; ++i) {
                    const int c = classify_ray(vfx::pixel_center_ray(fine, x * subsamples + i, y * subsamples + j),
                                               box_lo, box_hi, sun, lit_margin);
                    if (first < 0) first = c;
                    if (c != first || c == kUnclassified) {
                        mixed = true;
                        break;
                    }
                }
            if (!mixed) out(x, y) = static_cast<uint16_t>(first);
        }
    vfx::MaskImage banded = out;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (out(x, y) != kUnclassified) continue;
            for (int dy = -band; dy <= band; ++dy)
                for (int dx = -band; dx <= band; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx >= 0 && yy >= 0 && xx < w && yy < h) banded(xx, yy) = kUnclassified;
                }
        }
    return banded;
}

}  // namespace oracle
