#include "vfx/geometry/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace vfx {

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    std::vector<uint32_t> idx(points_.size());
    std::iota(idx.begin(), idx.end(), 0u);
    nodes_.reserve(points_.size());
    root_ = build(idx.data(), idx.data() + idx.size(), 0);
}

int32_t KdTree::build(uint32_t* begin, uint32_t* end, int depth) {
    if (begin == end) return -1;
    Aabb box;
    for (auto* it = begin; it != end; ++it) box.extend(points_[*it]);
    const int axis = box.longest_axis();
    auto* mid = begin + (end - begin) / 2;
    std::nth_element(begin, mid, end, [&](uint32_t a, uint32_t b) {
        if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
        return a < b;
    });
    const auto id = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(Node{*mid, axis});
    const int32_t l = build(begin, mid, depth + 1);
    const int32_t r = build(mid + 1, end, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

void KdTree::search(int32_t node, const Vec3& q, uint32_t& best, double& best_d2) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    const double d2 = (points_[n.point] - q).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && n.point < best)) {
        best = n.point;
        best_d2 = d2;
    }
    const double delta = q[n.axis] - points_[n.point][n.axis];
    const int32_t near = delta < 0 ? n.left : n.right;
    const int32_t far = delta < 0 ? n.right : n.left;
    search(near, q, best, best_d2);
    // Equal-distance candidates on the far side must still be visited for the tie rule.
    if (delta * delta <= best_d2) search(far, q, best, best_d2);
}

uint32_t KdTree::nearest(const Vec3& q) const {
    uint32_t best = UINT32_MAX;
    double best_d2 = kInf;
    search(root_, q, best, best_d2);
    return best;
}

}  // namespace vfx
