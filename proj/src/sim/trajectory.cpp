#include "vfx/sim/trajectory.hpp"

#include "vfx/core/error.hpp"

#include <algorithm>
#include <optional>

namespace vfx {

BezierPath::BezierPath(std::span<const Vec3> keypoints) {
    if (keypoints.size() < 2) throw Error(ErrorKind::TooFewPoints, "a path needs at least 2 keypoints");
    const size_t n = keypoints.size();
    std::vector<Vec3> tangents(n);
    tangents[0] = keypoints[1] - keypoints[0];
    tangents[n - 1] = keypoints[n - 1] - keypoints[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
        const Vec3 in = keypoints[i] - keypoints[i - 1], out = keypoints[i + 1] - keypoints[i];
        const double c = in.norm() * out.norm();
        const bool corner = c > 0 && in.dot(out) < std::cos(kCornerAngle) * c;
        tangents[i] = corner ? Vec3::Zero() : Vec3(0.5 * (keypoints[i + 1] - keypoints[i - 1]));
    }
    for (size_t i = 0; i + 1 < n; ++i)
        segments_.push_back({keypoints[i], keypoints[i] + tangents[i] / 3.0, keypoints[i + 1] - tangents[i + 1] / 3.0,
                             keypoints[i + 1]});

    cumulative_.push_back(0.0);
    key_t_.push_back(0.0);
    for (size_t s = 0; s < segments_.size(); ++s) {
        Vec3 prev = eval(s, 0.0);
        for (int k = 1; k <= kSamplesPerSegment; ++k) {
            const Vec3 p = eval(s, static_cast<double>(k) / kSamplesPerSegment);
            cumulative_.push_back(cumulative_.back() + (p - prev).norm());
            prev = p;
        }
        key_t_.push_back(cumulative_.back());
    }
    const double total = cumulative_.back();
    for (double& t : key_t_) t = total > 0 ? t / total : 0.0;
    key_t_.back() = 1.0;
}

Vec3 BezierPath::eval(size_t seg, double u) const {
    const auto& b = segments_[seg];
    const double v = 1.0 - u;
    return v * v * v * b[0] + 3 * v * v * u * b[1] + 3 * v * u * u * b[2] + u * u * u * b[3];
}

Vec3 BezierPath::derivative(size_t seg, double u) const {
    const auto& b = segments_[seg];
    const double v = 1.0 - u;
    return 3 * v * v * (b[1] - b[0]) + 6 * v * u * (b[2] - b[1]) + 3 * u * u * (b[3] - b[2]);
}

PathSample BezierPath::at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const size_t segs = segments_.size();
    size_t seg;
    double u;
    if (t == 0.0) {
        seg = 0, u = 0.0;
    } else if (t == 1.0) {
        seg = segs - 1, u = 1.0;
    } else {
        const double s = t * length();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
        const size_t i = std::min<size_t>(std::max<ptrdiff_t>(it - cumulative_.begin(), 1), cumulative_.size() - 1);
        const double span = cumulative_[i] - cumulative_[i - 1];
        const double frac = span > 0 ? (s - cumulative_[i - 1]) / span : 0.0;
        const size_t sample = i - 1;
        seg = std::min(sample / kSamplesPerSegment, segs - 1);
        u = (static_cast<double>(sample - seg * kSamplesPerSegment) + frac) / kSamplesPerSegment;
    }
    PathSample out;
    // Exact keypoints at segment ends.
    out.position = u == 0.0 ? segments_[seg][0] : u == 1.0 ? segments_[seg][3] : eval(seg, u);
    Vec3 d = derivative(seg, u);
    if (d.norm() < 1e-12 * std::max(1.0, length())) {
        // Zero tangent at a corner: use the chord of the adjacent control points.
        const auto& b = segments_[seg];
        d = u < 0.5 ? Vec3(b[2] - b[0]) : Vec3(b[3] - b[1]);
        if (d.norm() == 0) d = b[3] - b[0];
    }
    out.tangent = d.norm() > 0 ? Vec3(d.normalized()) : Vec3::UnitX();
    return out;
}

PathSample bezier_path(std::span<const Vec3> keypoints, double t) { return BezierPath(keypoints).at(t); }

Timeline animate_trajectory(const SceneObject& obj, std::span<const Vec3> keypoints, int frames, double fps) {
    if (frames < 1) throw Error(ErrorKind::InvariantViolation, "frame count must be >= 1");
    const BezierPath path(keypoints);
    Timeline tl;
    tl.fps = fps;
    tl.frame_count = frames;
    std::vector<PathSample> samples;
    std::vector<std::optional<double>> yaws;
    for (int f = 0; f < frames; ++f) {
        samples.push_back(path.at(frames == 1 ? 0.0 : static_cast<double>(f) / (frames - 1)));
        const Vec2 h = samples.back().tangent.head<2>();
        yaws.push_back(h.norm() > 1e-9 ? std::optional(std::atan2(h.y(), h.x())) : std::nullopt);
    }
    // Vertical stretches keep the last heading; a vertical start takes the first one.
    std::optional<double> held;
    for (auto& y : yaws) y ? held = y : y = held;
    held.reset();
    for (auto it = yaws.rbegin(); it != yaws.rend(); ++it) *it ? held = *it : *it = held;

    auto& track = tl.tracks[obj.object_id];
    for (int f = 0; f < frames; ++f) {
        TrackSample ts;
        ts.transform.translation = samples[f].position;
        ts.transform.scale = obj.transform.scale;
        ts.transform.rotation = yaws[f] ? yaw_rotation(*yaws[f]) : obj.transform.rotation;
        track.push_back(ts);
    }
    return tl;
}

Timeline merge_timelines(std::span<const Timeline> fragments) {
    Timeline out;
    bool first = true;
    for (const Timeline& t : fragments) {
        if (t.tracks.empty() && t.events.empty()) continue;
        if (first) {
            out.fps = t.fps;
            out.frame_count = t.frame_count;
            first = false;
        } else if (t.fps != out.fps || t.frame_count != out.frame_count) {
            throw Error(ErrorKind::InvariantViolation, "timeline fragments disagree on fps or frame count");
        }
        for (const auto& [id, track] : t.tracks) {
            if (out.tracks.count(id)) throw Error(ErrorKind::ConflictingTrack, "object '" + id + "' is animated twice");
            out.tracks[id] = track;
        }
        out.events.insert(out.events.end(), t.events.begin(), t.events.end());
    }
    return out;
}

}  // namespace vfx
