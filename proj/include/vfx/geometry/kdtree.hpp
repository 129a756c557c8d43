#pragma once

#include "vfx/core/math.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vfx {

/// Static 3D kd-tree for nearest-point queries. Ties on distance resolve to
/// the smaller point index, so results match a brute-force argmin scan.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points);

    size_t size() const { return points_.size(); }
    // Index of the nearest point; requires size() > 0.
    uint32_t nearest(const Vec3& q) const;

private:
    struct Node {
        uint32_t point;
        int axis;
        int32_t left = -1;
        int32_t right = -1;
    };

    int32_t build(uint32_t* begin, uint32_t* end, int depth);
    void search(int32_t node, const Vec3& q, uint32_t& best, double& best_d2) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    int32_t root_ = -1;
};

}  // namespace vfx
