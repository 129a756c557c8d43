#pragma once

#include "vfx/core/exec.hpp"
#include "vfx/geometry/bvh.hpp"
#include "vfx/scene/bundle.hpp"
#include "vfx/scene/representation.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace vfx {

/// Threshold grid tau_k = k / 20 for k = 1..19.
inline constexpr int kTauSteps = 20;
inline constexpr double tau_at(int k) { return static_cast<double>(k) / kTauSteps; }
/// Rendered alpha at or above this counts as covered.
inline constexpr double kAlphaBin = 0.5;

/// Per-face vote counts: votes[f] = number of views whose masked pixels first hit f.
struct FaceVotes {
    std::vector<uint32_t> votes;
    uint32_t views = 0;
    double visibility(uint32_t f) const { return static_cast<double>(votes[f]) / views; }
};

/// Visibility voting. Throws UnknownLabel when no mask id carries `label`.
FaceVotes vote_face_visibility(const SceneBundle& bundle, const Bvh& bvh, const std::string& label,
                               Exec exec = Exec::parallel);

struct LiftResult {
    std::vector<uint32_t> face_set;      // F*, ascending
    std::vector<uint32_t> gaussian_set;  // G*, ascending
    double tau_star = 0;
    std::map<double, double> miou_curve;        // only thresholds with a non-empty F
    std::array<size_t, kTauSteps - 1> face_counts{};  // |F(tau_k)| for k = 1..19
    FaceVotes votes;

    friend bool operator==(const LiftResult& a, const LiftResult& b) {
        return a.face_set == b.face_set && a.gaussian_set == b.gaussian_set && a.tau_star == b.tau_star &&
               a.miou_curve == b.miou_curve && a.face_counts == b.face_counts;
    }
};

/// IoU of a binarized alpha image against a binary mask; 1 when both are empty.
double mask_iou(const FloatImage& alpha, const BinaryImage& mask);

/// Index of the nearest face centroid for each Gaussian (ties to the smaller face).
std::vector<uint32_t> nearest_face_of_gaussians(const TriangleMesh& mesh, const GaussianCloud& cloud);

/// Threshold sweep over voted faces; see the project README for the procedure.
/// Throws UnknownLabel or EmptySelection.
LiftResult lift_instance(const SceneBundle& bundle, const Bvh& bvh, const std::string& label,
                         Exec exec = Exec::parallel);

/// Builds an extracted object from a lift: geometry re-expressed about the
/// selection centroid, transform placing it back where it was. The object is
/// registered in `rep` as inserted and still part of the background.
SceneObject& extract_object(SceneRepresentation& rep, const LiftResult& lift, const std::string& name);

/// Takes an extracted object's faces and Gaussians out of the background so it
/// can move independently. No-op for objects already detached.
void detach_from_background(SceneRepresentation& rep, SceneObject& obj);

/// Deletes an extracted object: its faces and Gaussians are marked removed,
/// the hole is patched, and the record leaves `rep.objects`.
void remove_instance(SceneRepresentation& rep, const std::string& object_id);

}  // namespace vfx
