#pragma once

#include "vfx/core/math.hpp"

#include <string_view>
#include <vector>

namespace vfx {

/// Anisotropic 3D Gaussian with degree-0 (view-independent) color.
struct Gaussian {
    Vec3 center = Vec3::Zero();
    Quat rotation = Quat::Identity();
    Vec3 scale = Vec3::Constant(0.01);
    double opacity = 1.0;
    Vec3 color = Vec3::Constant(0.5);

    // Sigma = R S S^T R^T
    Mat3 covariance() const {
        const Mat3 r = rotation.toRotationMatrix();
        return r * scale.cwiseProduct(scale).asDiagonal() * r.transpose();
    }
};

using GaussianCloud = std::vector<Gaussian>;

/// Throws InvariantViolation naming the offending row.
void validate_gaussians(const GaussianCloud& cloud, std::string_view what);

}  // namespace vfx
